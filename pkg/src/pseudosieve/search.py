"""Search engine: configuration, verification, work partitioning, execution.

A run partitions the t_p range into intervals sized from the wheel density,
hands intervals to workers over a queue (dynamic assignment), and records
progress in a text checkpoint after every completed interval so a killed run
resumes without recomputing or duplicating anything. Workers stream verified
candidates to per-worker append-only files; a final merge sorts and
deduplicates them.
"""

import hashlib
import logging
import multiprocessing as mp
import os
import secrets
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import lru_cache
from math import prod
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .dfe import (
    DEFAULT_BLOCK_CAP,
    DfeParams,
    generate_tp_block,
    match_tp_range,
    recombine,
    tn_window,
)
from .errors import (
    BlockOverflowError,
    CheckpointCorruptError,
    CheckpointMismatchError,
    InvalidConfigurationError,
)
from .filters import (
    admissible_x_table,
    build_normalized_tables,
    build_secondary_filter,
    normalized_mask,
    secondary_mask,
)
from .modarith import is_perfect_cube, is_perfect_square, legendre_symbol
from .primes import is_prime, next_prime, odd_primes_up_to, primes_1mod3_up_to, primes_up_to
from .wheel import (
    CUBE,
    MODES,
    SQUARE,
    FactoredModulus,
    Wheel,
    admissible_tn_residues,
    admissible_tp_residues,
    production_moduli,
)

log = logging.getLogger(__name__)

X_LO_FLOOR = 2
PRODUCTION_X_THRESHOLD = 10**20
_MODULI_WIDTH_FACTOR = 4
_MIN_INTERVALS = 16
_NORMALIZED_COUNT = 4
_LEVEL_EXTENSION_CAP = 128


class SearchInterrupted(RuntimeError):
    """Raised when a run stops early at an interrupt hook; state is saved."""


class Candidate(NamedTuple):
    """A verified hit: value, its decomposition, and the largest prime level
    at which it verifies."""

    x: int
    t_p: int
    t_n: int
    verified_p: int


# ---------------------------------------------------------------------------
# verification


def verify_pseudosquare(x: int, p_max: int) -> bool:
    """True iff x is 1 mod 8, a nonzero QR mod every odd prime <= p_max,
    and not a perfect square."""
    if x < 1 or x % 8 != 1:
        return False
    for q in odd_primes_up_to(p_max):
        if legendre_symbol(x, q) != 1:
            return False
    return not is_perfect_square(x)


def verify_pseudocube(x: int, p_max: int) -> bool:
    """True iff x is +-1 mod 9, a nonzero cubic residue mod every prime
    q = 1 mod 3 up to p_max, coprime to every prime <= p_max, and not a
    perfect cube."""
    if x < 1 or x % 9 not in (1, 8):
        return False
    for q in primes_up_to(p_max):
        if q == 3:
            continue  # +-1 mod 9 already settles divisibility by 3
        if q % 3 == 1:
            if pow(x, (q - 1) // 3, q) != 1:
                return False
        elif x % q == 0:
            return False
    return not is_perfect_cube(x)


def verify_value(mode: str, x: int, p_max: int) -> bool:
    if mode == SQUARE:
        return verify_pseudosquare(x, p_max)
    if mode == CUBE:
        return verify_pseudocube(x, p_max)
    raise InvalidConfigurationError(f"unknown mode {mode!r}")


def _passes_at_prime(mode: str, x: int, q: int) -> bool:
    """The single-prime condition used when extending a verified level."""
    if mode == SQUARE:
        return legendre_symbol(x, q) == 1
    if q == 3:
        return x % 9 in (1, 8)
    if q % 3 == 1:
        return pow(x, (q - 1) // 3, q) == 1
    return x % q != 0


def verified_level(mode: str, x: int, p_max: int) -> int:
    """Largest prime level >= p_max at which x still verifies.

    Assumes x verifies at p_max; extension stops at the first failing prime
    (or after a generous cap, since real candidates fail within a few primes).
    """
    level = p_max
    q = next_prime(p_max)
    for _ in range(_LEVEL_EXTENSION_CAP):
        if mode == SQUARE and q == 2:
            q = next_prime(q)
            continue
        if not _passes_at_prime(mode, x, q):
            return level
        level = q
        q = next_prime(q)
    return level


@lru_cache(maxsize=4096)
def _engine_table(mode: str, q: int) -> np.ndarray:
    return admissible_x_table(mode, q)


def _nonsquare_mask(xs: np.ndarray) -> np.ndarray:
    roots = np.rint(np.sqrt(xs.astype(np.float64))).astype(np.int64)
    return roots * roots != xs


def _noncube_mask(xs: np.ndarray) -> np.ndarray:
    roots = np.rint(np.cbrt(xs.astype(np.float64))).astype(np.int64)
    return roots * roots * roots != xs


def verify_batch(mode: str, xs: np.ndarray, p_max: int) -> np.ndarray:
    """Vectorized equivalent of the scalar verifiers over an int64 array.

    Requires values below 2^52 so the float perfect-power roots are exact;
    the engine routes bigger survivors through the scalar path.
    """
    if len(xs) and int(xs.max()) >= 1 << 52:
        raise InvalidConfigurationError("batch verification needs values < 2^52")
    if mode == SQUARE:
        mask = xs % 8 == 1
        for q in odd_primes_up_to(p_max):
            mask &= _engine_table(mode, q)[xs % q]
        mask &= _nonsquare_mask(xs)
        return mask
    m9 = xs % 9
    mask = (m9 == 1) | (m9 == 8)
    for q in primes_up_to(p_max):
        if q == 3:
            continue
        mask &= _engine_table(mode, q)[xs % q]
    mask &= _noncube_mask(xs)
    return mask


def _verified_levels_batch(mode: str, xs: np.ndarray, p_max: int) -> np.ndarray:
    """verified_level for every x in an int64 array of verified values."""
    levels = np.full(len(xs), p_max, dtype=np.int64)
    live = np.arange(len(xs))
    q = next_prime(p_max)
    for _ in range(_LEVEL_EXTENSION_CAP):
        if len(live) == 0:
            break
        if mode == SQUARE and q == 2:
            q = next_prime(q)
            continue
        if mode == CUBE and q == 3:
            keep = np.isin(xs[live] % 9, (1, 8))
        else:
            keep = _engine_table(mode, q)[xs[live] % q]
        live = live[keep]
        levels[live] = q
        q = next_prime(q)
    return levels


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class SearchConfig:
    """Everything a run needs; wheel residue sets are explicit so custom
    moduli round-trip through checkpoint fingerprints."""

    params: DfeParams
    p_max: int
    tp_wheel_spec: tuple[tuple[int, tuple[int, ...]], ...]
    tn_wheel_spec: tuple[tuple[int, tuple[int, ...]], ...]
    normalized_primes: tuple[int, ...]
    secondary_primes: tuple[int, ...]
    worker_count: int = 1
    checkpoint_path: str | None = None
    output_dir: str | None = None

    def __post_init__(self):
        if not is_prime(self.p_max):
            raise InvalidConfigurationError(f"p_max must be prime, got {self.p_max}")
        if self.worker_count < 1:
            raise InvalidConfigurationError("worker_count must be >= 1")
        for spec, modulus in (
            (self.tp_wheel_spec, self.params.m_p),
            (self.tn_wheel_spec, self.params.m_n),
        ):
            if tuple(f for f, _ in spec) != modulus.factors:
                raise InvalidConfigurationError("wheel spec does not match its modulus")

    def tp_wheel(self) -> Wheel:
        return Wheel(self.params.m_p, [rs for _, rs in self.tp_wheel_spec])

    def tn_wheel(self) -> Wheel:
        return Wheel(self.params.m_n, [rs for _, rs in self.tn_wheel_spec])


def _smallest_prime(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def _factor_constrains(mode: str, factor: int, p_max: int) -> bool:
    """Whether a wheel factor carries a residue condition at level p_max.

    The power-of-two factor (squares) and the 2/9 factors (cubes) encode the
    unconditional congruences; a prime factor only constrains when it is at
    most p_max. Factors above p_max stay in the moduli purely as strides and
    admit every residue, keeping enumeration complete.
    """
    if mode == SQUARE and factor in (2, 4, 8):
        return True
    if mode == CUBE and factor in (2, 3, 9):
        return True
    return _smallest_prime(factor) <= p_max


def choose_moduli(mode: str, p_max: int, x_lo: int, x_hi: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Pick (tp factors, tn factors) sized to the window.

    Production moduli when the level and range warrant them; otherwise grow
    both sides greedily (next condition prime to the smaller side) until the
    product passes a small multiple of the window width, leaving the rest of
    the condition primes to the filter stages.
    """
    if mode == SQUARE:
        pool = [q for q in odd_primes_up_to(p_max)]
        forced = [(8, "n")]
        production_ready = p_max >= 97
    else:
        pool = primes_1mod3_up_to(p_max)
        forced = [(2, "p"), (9, "n")]
        production_ready = p_max >= 181
    if production_ready and x_hi >= PRODUCTION_X_THRESHOLD:
        m_p, m_n = production_moduli(mode)
        return m_p.factors, m_n.factors

    width = max(x_hi - x_lo, 10**6)
    cap = width * _MODULI_WIDTH_FACTOR
    sides: dict[str, list[int]] = {"p": [], "n": []}
    prods = {"p": 1, "n": 1}
    for f, s in forced:
        sides[s].append(f)
        prods[s] *= f
    for q in pool:
        if prods["p"] * prods["n"] * q > cap:
            break
        s = "p" if prods["p"] <= prods["n"] else "n"
        if prods[s] * q >= 2**62:
            s = "n" if s == "p" else "p"
            if prods[s] * q >= 2**62:
                break
        sides[s].append(q)
        prods[s] *= q
    if not sides["p"]:
        # degenerate pool: the t_p side must still be nonempty
        sides["p"].append(sides["n"].pop() if len(sides["n"]) > 1 else pool[0])
    return tuple(sorted(sides["p"])), tuple(sorted(sides["n"]))


def _filter_primes(mode: str, p_max: int, mp_product: int, mn_product: int):
    """Split the leftover condition primes into normalized and secondary."""
    mm = mp_product * mn_product
    candidates = [q for q in primes_up_to(p_max) if mm % q != 0]
    if mode == SQUARE:
        candidates = [q for q in candidates if q != 2]
    strong = [q for q in candidates if len(_engine_table(mode, q).nonzero()[0]) / q <= 0.6]
    normalized = tuple(strong[:_NORMALIZED_COUNT])
    secondary = tuple(q for q in candidates if q not in normalized)
    return normalized, secondary


def build_search_config(
    mode: str,
    p_max: int,
    x_lo: int,
    x_hi: int,
    *,
    workers: int = 1,
    block_cap: int = DEFAULT_BLOCK_CAP,
    moduli="auto",
    checkpoint_path: str | None = None,
    output_dir: str | None = None,
) -> SearchConfig:
    """Assemble a validated SearchConfig, deriving wheels and filter primes.

    moduli is "auto", "production", or a parsed config dict with explicit
    [tp]/[tn] factor-residue lists.
    """
    if mode not in MODES:
        raise InvalidConfigurationError(f"unknown mode {mode!r}")
    if not is_prime(p_max):
        raise InvalidConfigurationError(f"p_max must be prime, got {p_max}")
    if mode == SQUARE and p_max < 3:
        raise InvalidConfigurationError("square searches need p_max >= 3")
    x_lo = max(x_lo, X_LO_FLOOR)

    if isinstance(moduli, dict):
        tp_spec = tuple((f, tuple(rs)) for f, rs in moduli["tp"])
        tn_spec = tuple((f, tuple(rs)) for f, rs in moduli["tn"])
        m_p = FactoredModulus.from_factors([f for f, _ in tp_spec])
        m_n = FactoredModulus.from_factors([f for f, _ in tn_spec])
    else:
        if moduli == "production":
            m_p, m_n = production_moduli(mode)
        elif moduli == "auto":
            tp_factors, tn_factors = choose_moduli(mode, p_max, x_lo, x_hi)
            m_p = FactoredModulus.from_factors(tp_factors)
            m_n = FactoredModulus.from_factors(tn_factors)
        else:
            raise InvalidConfigurationError(f"unknown moduli selector {moduli!r}")
        tp_spec = tuple(
            (
                f,
                tuple(admissible_tp_residues(mode, f, m_n.product))
                if _factor_constrains(mode, f, p_max)
                else tuple(range(f)),
            )
            for f in m_p.factors
        )
        tn_spec = tuple(
            (
                f,
                tuple(admissible_tn_residues(mode, f, m_p.product))
                if _factor_constrains(mode, f, p_max)
                else tuple(range(f)),
            )
            for f in m_n.factors
        )

    params = DfeParams(mode, m_p, m_n, x_lo, x_hi, block_cap)
    normalized, secondary = _filter_primes(mode, p_max, m_p.product, m_n.product)
    return SearchConfig(
        params,
        p_max,
        tp_spec,
        tn_spec,
        normalized,
        secondary,
        worker_count=workers,
        checkpoint_path=checkpoint_path,
        output_dir=output_dir,
    )


def config_fingerprint(config: SearchConfig) -> str:
    """Hash of every field that determines the result set (not worker count,
    checkpoint or output paths, so restarts may change those freely)."""
    p = config.params
    text = "|".join(
        [
            p.mode,
            str(config.p_max),
            str(p.x_lo),
            str(p.x_hi),
            str(p.block_cap),
            repr(config.tp_wheel_spec),
            repr(config.tn_wheel_spec),
            repr(config.normalized_primes),
            repr(config.secondary_primes),
        ]
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# checkpointing


@dataclass(frozen=True)
class Checkpoint:
    """Completed t_p intervals plus the identity of the run they belong to."""

    mode: str
    p_max: int
    m_p: int
    m_n: int
    x_lo: int
    x_hi: int
    fingerprint: str
    done: tuple[tuple[int, int], ...]
    cursor: int


def checkpoint_for(config: SearchConfig, done) -> Checkpoint:
    p = config.params
    done = tuple(sorted(done))
    return Checkpoint(
        p.mode,
        config.p_max,
        p.m_p.product,
        p.m_n.product,
        p.x_lo,
        p.x_hi,
        config_fingerprint(config),
        done,
        _cursor_after(done),
    )


def _cursor_after(done: tuple[tuple[int, int], ...]) -> int:
    """Lowest t_p not covered by the sorted completed intervals."""
    cursor = 0
    for lo, hi in done:
        if lo > cursor:
            break
        cursor = max(cursor, hi)
    return cursor


def checkpoint_save(cp: Checkpoint, path: str) -> None:
    """Write atomically: temp file in the same directory, then rename."""
    lines = [f"{cp.mode} {cp.p_max} {cp.m_p} {cp.m_n} {cp.x_lo} {cp.x_hi} {cp.fingerprint}"]
    lines += [f"done {lo} {hi}" for lo, hi in cp.done]
    lines.append(f"cursor {cp.cursor}")
    target = Path(path)
    tmp = target.with_name(target.name + f".tmp{os.getpid()}")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp, target)


def checkpoint_load(path: str) -> Checkpoint:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CheckpointCorruptError(f"cannot read checkpoint {path}: {exc}") from exc
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise CheckpointCorruptError("checkpoint too short")
    head = lines[0].split()
    if len(head) != 7 or head[0] not in MODES:
        raise CheckpointCorruptError(f"bad checkpoint header: {lines[0]!r}")
    try:
        p_max, m_p, m_n, x_lo, x_hi = (int(t) for t in head[1:6])
        fingerprint = head[6]
        done = []
        for ln in lines[1:-1]:
            tag, lo, hi = ln.split()
            if tag != "done":
                raise ValueError(f"expected done line, got {ln!r}")
            lo, hi = int(lo), int(hi)
            if not 0 <= lo < hi:
                raise ValueError(f"bad interval [{lo}, {hi})")
            done.append((lo, hi))
        tag, cursor = lines[-1].split()
        if tag != "cursor":
            raise ValueError(f"expected cursor line, got {lines[-1]!r}")
        cursor = int(cursor)
    except ValueError as exc:
        raise CheckpointCorruptError(f"malformed checkpoint: {exc}") from exc
    done_sorted = tuple(sorted(done))
    for (a_lo, a_hi), (b_lo, b_hi) in zip(done_sorted, done_sorted[1:]):
        if b_lo < a_hi:
            raise CheckpointCorruptError("checkpoint intervals overlap")
    if cursor != _cursor_after(done_sorted):
        raise CheckpointCorruptError("checkpoint cursor disagrees with done intervals")
    return Checkpoint(head[0], p_max, m_p, m_n, x_lo, x_hi, fingerprint, done_sorted, cursor)


# ---------------------------------------------------------------------------
# partitioning and the per-interval pipeline


def partition_work(config: SearchConfig) -> list[tuple[int, int]]:
    """Disjoint [lo, hi) intervals covering the whole t_p range.

    Width targets the block cap with 20% headroom via the wheel density, and
    is further split so a run has enough intervals to parallelize and to
    checkpoint at a useful granularity. Deterministic given the config.
    """
    t_end = config.params.tp_end
    count = prod(len(rs) for _, rs in config.tp_wheel_spec)
    density = count / config.params.m_p.product
    by_cap = max(1, int(config.params.block_cap * 0.8 / density))
    by_parallel = -(-t_end // _MIN_INTERVALS)
    width = max(1, min(by_cap, by_parallel))
    return [(lo, min(lo + width, t_end)) for lo in range(0, t_end, width)]


class _RunContext:
    """Per-process engine state rebuilt from a SearchConfig."""

    def __init__(self, config: SearchConfig):
        self.config = config
        self.params = config.params
        self.mode = config.params.mode
        self.tp_wheel = config.tp_wheel()
        self.tn_wheel = config.tn_wheel()
        mp_prod = self.params.m_p.product
        mn_prod = self.params.m_n.product
        self.secondary = (
            build_secondary_filter(self.mode, config.secondary_primes, mp_prod, mn_prod)
            if config.secondary_primes
            else None
        )
        # recombined x fits int64 iff the largest t_p * M_n does
        self.vector_safe = config.params.tp_end * mn_prod < 2**62 and self.params.x_hi < 1 << 52


def _process_interval(ctx: _RunContext, lo: int, hi: int) -> list[Candidate]:
    params = ctx.params
    config = ctx.config
    try:
        block = generate_tp_block(ctx.tp_wheel, lo, hi, params.block_cap)
    except BlockOverflowError:
        if hi - lo <= 1:
            raise
        mid = (lo + hi) // 2
        return _process_interval(ctx, lo, mid) + _process_interval(ctx, mid, hi)
    if len(block) == 0:
        return []
    window = tn_window(params, block)
    if window is None:
        return []
    tn_lo, tn_hi = window
    mp_prod = params.m_p.product
    mn_prod = params.m_n.product
    found: list[Candidate] = []
    values = block.values
    for t_n in _tn_iter(ctx, tn_lo, tn_hi):
        i, j = match_tp_range(params, values, t_n)
        if i >= j:
            continue
        window_vals = values[i:j]
        if config.normalized_primes:
            tables = build_normalized_tables(
                ctx.mode, config.normalized_primes, mp_prod, mn_prod, t_n
            )
            window_vals = window_vals[normalized_mask(tables, window_vals)]
            if len(window_vals) == 0:
                continue
        if ctx.secondary is not None:
            window_vals = window_vals[secondary_mask(ctx.secondary, window_vals, t_n)]
            if len(window_vals) == 0:
                continue
        found.extend(_finalize(ctx, window_vals, t_n))
    return found


def _tn_iter(ctx: _RunContext, tn_lo: int, tn_hi: int):
    from .wheel import wheel_enumerate

    return wheel_enumerate(ctx.tn_wheel, tn_lo, tn_hi + 1)


def _finalize(ctx: _RunContext, tp_vals: np.ndarray, t_n: int) -> list[Candidate]:
    """Recombine survivors, run full verification, attach verified levels."""
    params = ctx.params
    mode = ctx.mode
    if ctx.vector_safe:
        xs = tp_vals * params.m_n.product - t_n * params.m_p.product
        ok = verify_batch(mode, xs, ctx.config.p_max)
        xs_ok = xs[ok]
        tp_ok = tp_vals[ok]
        if len(xs_ok) == 0:
            return []
        levels = _verified_levels_batch(mode, xs_ok, ctx.config.p_max)
        return [
            Candidate(x, tp, t_n, lv)
            for x, tp, lv in zip(xs_ok.tolist(), tp_ok.tolist(), levels.tolist())
        ]
    out = []
    for tp in tp_vals:
        x = recombine(params, int(tp), t_n)
        if params.x_lo <= x <= params.x_hi and verify_value(mode, x, ctx.config.p_max):
            out.append(Candidate(x, int(tp), t_n, verified_level(mode, x, ctx.config.p_max)))
        else:
            log.debug("survivor failed full verification: x=%s t_p=%s t_n=%s", x, tp, t_n)
    return out


# ---------------------------------------------------------------------------
# output records


def _record_line(c: Candidate) -> str:
    stamp = datetime.now(timezone.utc).isoformat()
    return f"{c.x} {c.t_p} {c.t_n} {stamp}"


def parse_record_line(line: str) -> tuple[int, int, int, str]:
    x, t_p, t_n, stamp = line.split()
    return int(x), int(t_p), int(t_n), stamp


def merge_output_files(output_dir: str, fingerprint: str) -> list[tuple[int, int, int, str]]:
    """Combine this run's worker files: dedupe on (x, t_p, t_n), sort by x,
    write results.txt, and return the records."""
    out = Path(output_dir)
    seen: dict[tuple[int, int, int], str] = {}
    for path in sorted(out.glob(f"worker-{fingerprint[:8]}-*.out")):
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            try:
                x, t_p, t_n, stamp = parse_record_line(line)
            except ValueError:
                log.warning("skipping malformed record in %s: %r", path.name, line)
                continue
            seen.setdefault((x, t_p, t_n), stamp)
    records = sorted((x, t_p, t_n, stamp) for (x, t_p, t_n), stamp in seen.items())
    text = "".join(f"{x} {t_p} {t_n} {stamp}\n" for x, t_p, t_n, stamp in records)
    (out / "results.txt").write_text(text, encoding="utf-8")
    return records


# ---------------------------------------------------------------------------
# run orchestration


def _worker_main(config: SearchConfig, worker_id: int, nonce: str, task_q, result_q):
    ctx = _RunContext(config)
    out_file = None
    if config.output_dir:
        fp8 = config_fingerprint(config)[:8]
        out_path = Path(config.output_dir) / f"worker-{fp8}-{nonce}-{worker_id}.out"
        out_file = open(out_path, "a", encoding="utf-8")
    try:
        while True:
            interval = task_q.get()
            if interval is None:
                break
            lo, hi = interval
            try:
                cands = _process_interval(ctx, lo, hi)
                if out_file is not None:
                    for c in cands:
                        out_file.write(_record_line(c) + "\n")
                    out_file.flush()
                result_q.put((interval, cands, None))
            except Exception as exc:  # noqa: BLE001 - reported to coordinator
                result_q.put((interval, None, f"{type(exc).__name__}: {exc}"))
                break
    finally:
        if out_file is not None:
            out_file.close()


ProgressFn = Callable[[int, int, int], None]


def run_search(
    config: SearchConfig,
    *,
    resume: bool = False,
    progress: ProgressFn | None = None,
    interrupt_after: int | None = None,
) -> list[Candidate]:
    """Execute a search and return every verified candidate, sorted by value.

    With resume=True and an existing checkpoint, completed intervals are
    skipped; their results are recovered from the run's output files, so
    resuming requires output_dir. A fingerprint mismatch refuses to resume.
    """
    fingerprint = config_fingerprint(config)
    intervals = partition_work(config)
    done: set[tuple[int, int]] = set()

    if resume and config.checkpoint_path and os.path.exists(config.checkpoint_path):
        cp = checkpoint_load(config.checkpoint_path)
        if cp.fingerprint != fingerprint:
            raise CheckpointMismatchError(
                f"checkpoint fingerprint {cp.fingerprint} does not match run {fingerprint}"
            )
        bad = set(cp.done) - set(intervals)
        if bad:
            raise CheckpointCorruptError(f"checkpoint intervals not in this partition: {sorted(bad)[:3]}")
        done = set(cp.done)
        if done and not config.output_dir:
            raise InvalidConfigurationError("resuming needs output_dir to recover prior records")

    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        stale = list(out.glob(f"worker-{fingerprint[:8]}-*.out"))
        if stale and not resume:
            raise InvalidConfigurationError(
                f"output dir already holds {len(stale)} record file(s) for this "
                "configuration; resume the run or point at a clean directory"
            )

    pending = [iv for iv in intervals if iv not in done]
    nonce = secrets.token_hex(4)
    collected: list[Candidate] = []
    completed_now = 0

    def note_done(interval, cands):
        nonlocal completed_now
        done.add(interval)
        collected.extend(cands)
        completed_now += 1
        if config.checkpoint_path:
            checkpoint_save(checkpoint_for(config, done), config.checkpoint_path)
        if progress is not None:
            progress(len(done), len(intervals), len(collected))
        if interrupt_after is not None and completed_now >= interrupt_after and len(done) < len(intervals):
            raise SearchInterrupted(f"stopped after {completed_now} interval(s)")

    if config.worker_count == 1 or len(pending) <= 1:
        ctx = _RunContext(config)
        out_file = None
        if config.output_dir:
            out_path = Path(config.output_dir) / f"worker-{fingerprint[:8]}-{nonce}-0.out"
            out_file = open(out_path, "a", encoding="utf-8")
        try:
            for interval in pending:
                cands = _process_interval(ctx, *interval)
                if out_file is not None:
                    for c in cands:
                        out_file.write(_record_line(c) + "\n")
                    out_file.flush()
                note_done(interval, cands)
        finally:
            if out_file is not None:
                out_file.close()
    else:
        n_workers = min(config.worker_count, len(pending))
        ctx_mp = mp.get_context("fork")
        task_q = ctx_mp.Queue()
        result_q = ctx_mp.Queue()
        for iv in pending:
            task_q.put(iv)
        for _ in range(n_workers):
            task_q.put(None)
        procs = [
            ctx_mp.Process(target=_worker_main, args=(config, i, nonce, task_q, result_q))
            for i in range(n_workers)
        ]
        for p in procs:
            p.start()
        try:
            for _ in range(len(pending)):
                interval, cands, err = result_q.get()
                if err is not None:
                    raise RuntimeError(f"worker failed on interval {interval}: {err}")
                note_done(interval, cands)
        finally:
            for p in procs:
                p.terminate()
            for p in procs:
                p.join()

    if config.output_dir:
        records = merge_output_files(config.output_dir, fingerprint)
        mode, p_max = config.params.mode, config.p_max
        return [
            Candidate(x, t_p, t_n, verified_level(mode, x, p_max))
            for x, t_p, t_n, _ in records
        ]
    collected.sort()
    return collected


def minima_by_level(candidates: list[Candidate], p_max: int) -> list[tuple[int, int]]:
    """(prime level, minimal x) for p_max and every higher level some
    candidate still verifies at; one search yields minima for many levels."""
    if not candidates:
        return []
    out = []
    level = p_max
    top = max(c.verified_p for c in candidates)
    while level <= top:
        qualifying = [c.x for c in candidates if c.verified_p >= level]
        if qualifying:
            out.append((level, min(qualifying)))
        level = next_prime(level)
    return out
