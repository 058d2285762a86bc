"""Sieve filters applied to matched (t_p, t_n) pairs before recombination.

Stage one is a set of small normalized tables, rebuilt per t_n and indexed
directly by t_p mod q, so the inner loop does one table hit per prime.
Stage two covers the remaining condition primes up to p_max with the x mod q
admissibility test, computed from precomputed M_p mod q / M_n mod q and
short-circuited on the first failure.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigurationError
from .wheel import MODES, target_residues


def admissible_x_table(mode: str, q: int) -> np.ndarray:
    """Boolean table over x mod q of the mode's residue condition at q."""
    table = np.zeros(q, dtype=bool)
    table[target_residues(mode, q)] = True
    return table


def _check_primes(mode: str, primes, m_p: int, m_n: int) -> tuple[int, ...]:
    if mode not in MODES:
        raise InvalidConfigurationError(f"unknown mode {mode!r}")
    primes = tuple(int(q) for q in primes)
    for q in primes:
        if q < 2:
            raise InvalidConfigurationError(f"filter prime {q} out of range")
        if m_p % q == 0 or m_n % q == 0:
            raise InvalidConfigurationError(
                f"filter prime {q} divides a modulus; the wheel already enforces it"
            )
    return primes


@dataclass
class NormalizedTableSet:
    """Per-t_n boolean tables, one per prime, indexed by t_p mod q."""

    mode: str
    t_n: int
    primes: tuple[int, ...]
    tables: list[np.ndarray]


def build_normalized_tables(
    mode: str, primes, m_p: int, m_n: int, t_n: int
) -> NormalizedTableSet:
    """Tables with table[q][s] == (s*M_n - t_n*M_p mod q is admissible)."""
    primes = _check_primes(mode, primes, m_p, m_n)
    tables = []
    for q in primes:
        idx = (np.arange(q, dtype=np.int64) * (m_n % q) - (t_n % q) * (m_p % q)) % q
        tables.append(admissible_x_table(mode, q)[idx])
    return NormalizedTableSet(mode, t_n, primes, tables)


def passes_normalized(t_p: int, tables: NormalizedTableSet) -> bool:
    for q, table in zip(tables.primes, tables.tables):
        if not table[t_p % q]:
            return False
    return True


def normalized_mask(tables: NormalizedTableSet, t_p_values: np.ndarray) -> np.ndarray:
    """Vectorized passes_normalized over an int64 t_p array."""
    mask = np.ones(len(t_p_values), dtype=bool)
    for q, table in zip(tables.primes, tables.tables):
        mask &= table[t_p_values % q]
    return mask


@dataclass
class SecondaryFilter:
    """x mod q admissibility for the condition primes beyond the tables."""

    mode: str
    primes: tuple[int, ...]
    mp_mod: tuple[int, ...]
    mn_mod: tuple[int, ...]
    tables: list[np.ndarray]


def build_secondary_filter(mode: str, primes, m_p: int, m_n: int) -> SecondaryFilter:
    primes = _check_primes(mode, primes, m_p, m_n)
    if list(primes) != sorted(primes):
        raise InvalidConfigurationError("secondary primes must ascend")
    return SecondaryFilter(
        mode,
        primes,
        tuple(m_p % q for q in primes),
        tuple(m_n % q for q in primes),
        [admissible_x_table(mode, q) for q in primes],
    )


def passes_secondary(filt: SecondaryFilter, t_p: int, t_n: int) -> bool:
    """Short-circuit x mod q admissibility across the filter's primes.

    x mod q is (t_p mod q)*(M_n mod q) - (t_n mod q)*(M_p mod q) mod q, so
    intermediates stay below q^2 regardless of operand sizes.
    """
    for q, mpq, mnq, table in zip(filt.primes, filt.mp_mod, filt.mn_mod, filt.tables):
        if not table[(t_p % q * mnq - t_n % q * mpq) % q]:
            return False
    return True


def secondary_evaluations(filt: SecondaryFilter, t_p: int, t_n: int) -> int:
    """Number of primes examined before passes_secondary decides."""
    for i, (q, mpq, mnq, table) in enumerate(
        zip(filt.primes, filt.mp_mod, filt.mn_mod, filt.tables), 1
    ):
        if not table[(t_p % q * mnq - t_n % q * mpq) % q]:
            return i
    return len(filt.primes)


def secondary_mask(filt: SecondaryFilter, t_p_values: np.ndarray, t_n: int) -> np.ndarray:
    """Vectorized passes_secondary; primes applied in order on survivors only."""
    mask = np.ones(len(t_p_values), dtype=bool)
    live = np.arange(len(t_p_values))
    vals = t_p_values
    for q, mpq, mnq, table in zip(filt.primes, filt.mp_mod, filt.mn_mod, filt.tables):
        if len(live) == 0:
            break
        keep = table[(vals % q * mnq - t_n % q * mpq) % q]
        live = live[keep]
        vals = vals[keep]
    mask[:] = False
    mask[live] = True
    return mask
