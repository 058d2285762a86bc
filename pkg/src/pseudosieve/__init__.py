"""Pseudosquare and pseudocube search toolkit.

Wheel-driven doubly-focused enumeration over a value window, residue-table
filtering, full verification of survivors, checkpointed parallel runs, a
brute-force oracle for cross-checks, and distribution statistics for the
published minima tables.
"""

from .analysis import (
    PseudoRecord,
    brute_force_all,
    brute_force_min,
    bundled_table,
    conjecture_ratio,
    crossover_ratio,
    crossover_table,
    crossover_value,
    load_table,
    load_table_file,
    table_stats,
)
from .dfe import DEFAULT_BLOCK_CAP, DfeParams, decompose, recombine
from .errors import (
    BlockOverflowError,
    CheckpointCorruptError,
    CheckpointMismatchError,
    EmptyWheelError,
    InvalidConfigurationError,
    InvalidModulusError,
    InvalidRecordError,
    NotInvertibleError,
    PseudosieveError,
)
from .search import (
    Candidate,
    Checkpoint,
    SearchConfig,
    SearchInterrupted,
    build_search_config,
    checkpoint_load,
    checkpoint_save,
    config_fingerprint,
    minima_by_level,
    partition_work,
    run_search,
    verified_level,
    verify_pseudocube,
    verify_pseudosquare,
    verify_value,
)
from .wheel import (
    CUBE,
    MODES,
    SQUARE,
    FactoredModulus,
    Wheel,
    build_tn_wheel,
    build_tp_wheel,
    production_moduli,
    wheel_enumerate,
)

__version__ = "0.1.0"

__all__ = [
    "BlockOverflowError",
    "CUBE",
    "Candidate",
    "Checkpoint",
    "CheckpointCorruptError",
    "CheckpointMismatchError",
    "DEFAULT_BLOCK_CAP",
    "DfeParams",
    "EmptyWheelError",
    "FactoredModulus",
    "InvalidConfigurationError",
    "InvalidModulusError",
    "InvalidRecordError",
    "MODES",
    "NotInvertibleError",
    "PseudoRecord",
    "PseudosieveError",
    "SQUARE",
    "SearchConfig",
    "SearchInterrupted",
    "Wheel",
    "brute_force_all",
    "brute_force_min",
    "build_search_config",
    "build_tn_wheel",
    "build_tp_wheel",
    "bundled_table",
    "checkpoint_load",
    "checkpoint_save",
    "config_fingerprint",
    "conjecture_ratio",
    "crossover_ratio",
    "crossover_table",
    "crossover_value",
    "decompose",
    "load_table",
    "load_table_file",
    "minima_by_level",
    "partition_work",
    "production_moduli",
    "recombine",
    "run_search",
    "table_stats",
    "verified_level",
    "verify_pseudocube",
    "verify_pseudosquare",
    "verify_value",
    "wheel_enumerate",
    "__version__",
]
