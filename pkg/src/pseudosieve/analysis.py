"""Table records, the brute-force oracle, and conjectured-growth statistics.

The brute-force scan here is deliberately independent of the wheel/DFE
machinery: it walks candidates directly and applies the defining residue,
coprimality and perfect-power conditions, so it can serve as the oracle in
differential tests against the search engine.
"""

import math
from functools import lru_cache
from importlib import resources
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InvalidConfigurationError, InvalidRecordError
from .modarith import integer_nth_root, is_cubic_residue, legendre_symbol
from .primes import (
    is_prime,
    nth_prime,
    nth_prime_1mod3,
    odd_primes_up_to,
    primes_up_to,
)
from .wheel import CUBE, MODES, SQUARE

BRUTE_FORCE_BOUND_LIMIT = 10**9
_CHUNK = 1 << 22


class PseudoRecord(NamedTuple):
    """One table row: index n, its prime level, and the minimal value."""

    n: int
    prime: int
    value: int
    kind: str


def _infer_kind(n: int, prime: int) -> str:
    if nth_prime(n) == prime:
        return SQUARE
    if nth_prime_1mod3(n) == prime:
        return CUBE
    raise InvalidRecordError(f"prime {prime} is not the {n}-th prime of either kind")


def load_table(text: str) -> list[PseudoRecord]:
    """Parse "n prime L" lines into records of one consistent kind."""
    records = []
    kind = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InvalidRecordError(f"line {ln}: expected 'n prime L', got {len(parts)} fields")
        try:
            n, prime, value = (int(p) for p in parts)
        except ValueError as exc:
            raise InvalidRecordError(f"line {ln}: non-integer field") from exc
        if n < 1 or prime < 2 or value < 1:
            raise InvalidRecordError(f"line {ln}: fields out of range")
        k = _infer_kind(n, prime)
        if kind is None:
            kind = k
        elif k != kind:
            raise InvalidRecordError(f"line {ln}: mixes {k} rows into a {kind} table")
        records.append(PseudoRecord(n, prime, value, k))
    if not records:
        raise InvalidRecordError("table holds no records")
    return records


def load_table_file(path) -> list[PseudoRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return load_table(fh.read())


def bundled_table(kind: str) -> list[PseudoRecord]:
    """The packaged minimal-value table for a mode."""
    name = {SQUARE: "pseudosquares.txt", CUBE: "pseudocubes.txt"}[kind]
    text = resources.files("pseudosieve.tables").joinpath(name).read_text(encoding="utf-8")
    return load_table(text)


@lru_cache(maxsize=2048)
def _condition_table(mode: str, q: int) -> np.ndarray:
    """x mod q admissibility for the oracle; built from the scalar criteria."""
    if mode == SQUARE:
        return np.array([legendre_symbol(r, q) == 1 for r in range(q)])
    if q % 3 == 1:
        e = (q - 1) // 3
        return np.array([pow(r, e, q) == 1 for r in range(q)])
    table = np.ones(q, dtype=bool)
    table[0] = False
    return table


def _square_scan(p_max: int, lo: int, hi: int) -> np.ndarray:
    """All x in [lo, hi] that are 1 mod 8, QR mod every odd prime <= p_max,
    and not perfect squares."""
    start = lo + (1 - lo) % 8
    xs = np.arange(start, hi + 1, 8, dtype=np.int64)
    for q in odd_primes_up_to(p_max):
        xs = xs[_condition_table(SQUARE, q)[xs % q]]
        if len(xs) == 0:
            return xs
    roots = np.rint(np.sqrt(xs.astype(np.float64))).astype(np.int64)
    return xs[roots * roots != xs]


def _cube_scan(p_max: int, lo: int, hi: int) -> np.ndarray:
    """All x in [lo, hi] that are +-1 mod 9, cubic residues mod every prime
    q = 1 mod 3 up to p_max, coprime to every prime <= p_max, and not cubes."""
    a = np.arange(lo + (1 - lo) % 9, hi + 1, 9, dtype=np.int64)
    b = np.arange(lo + (8 - lo) % 9, hi + 1, 9, dtype=np.int64)
    xs = np.concatenate([a, b])
    xs.sort()
    for q in primes_up_to(p_max):
        if q == 3:
            continue
        xs = xs[_condition_table(CUBE, q)[xs % q]]
        if len(xs) == 0:
            return xs
    roots = np.rint(np.cbrt(xs.astype(np.float64))).astype(np.int64)
    return xs[roots * roots * roots != xs]


def _scan(mode: str, p_max: int, lo: int, hi: int) -> np.ndarray:
    return _square_scan(p_max, lo, hi) if mode == SQUARE else _cube_scan(p_max, lo, hi)


def _check_scan_args(mode: str, p_max: int, bound: int):
    if mode not in MODES:
        raise InvalidConfigurationError(f"unknown mode {mode!r}")
    if bound < 1:
        raise InvalidConfigurationError(f"bound must be >= 1, got {bound}")
    if bound > BRUTE_FORCE_BOUND_LIMIT:
        raise InvalidConfigurationError(
            f"bound {bound} exceeds the brute-force limit {BRUTE_FORCE_BOUND_LIMIT}"
        )
    if p_max < 2 or not is_prime(p_max):
        raise InvalidConfigurationError(f"p_max must be a prime >= 2, got {p_max}")


def brute_force_all(mode: str, p_max: int, bound: int) -> np.ndarray:
    """Every qualifying value <= bound as an ascending int64 array."""
    _check_scan_args(mode, p_max, bound)
    parts = [_scan(mode, p_max, lo, min(lo + _CHUNK - 1, bound)) for lo in range(1, bound + 1, _CHUNK)]
    return np.concatenate(parts)


def brute_force_min(mode: str, p_max: int, bound: int) -> int | None:
    """Smallest qualifying value <= bound, or None; scans in early-exit chunks."""
    _check_scan_args(mode, p_max, bound)
    for lo in range(1, bound + 1, _CHUNK):
        found = _scan(mode, p_max, lo, min(lo + _CHUNK - 1, bound))
        if len(found):
            return int(found[0])
    return None


def conjecture_ratio(record: PseudoRecord) -> float:
    """c_2(n) = L/(2^n ln p_n) for squares, c_3(n) = L/(3^n ln(q_n)^2) for cubes."""
    if record.kind == SQUARE:
        return record.value / (2**record.n * math.log(record.prime))
    return record.value / (3**record.n * math.log(record.prime) ** 2)


def crossover_value(cube_value: int, square_value: int) -> float:
    """cube_value^(2/3) / square_value with the 2/3 power taken exactly.

    The integer cube root of cube_value^2 is exact, so the only rounding is
    one float division at the end.
    """
    if cube_value < 1 or square_value < 1:
        raise ValueError("values must be positive")
    return integer_nth_root(cube_value * cube_value, 3) / square_value


def crossover_ratio(square_rec: PseudoRecord, cube_rec: PseudoRecord) -> float:
    """L_cube^(2/3) / L_square for a square and a cube record sharing n."""
    if square_rec.kind != SQUARE or cube_rec.kind != CUBE:
        raise InvalidRecordError("need a square record and a cube record, in that order")
    if square_rec.n != cube_rec.n:
        raise InvalidRecordError(f"index mismatch: n={square_rec.n} vs n={cube_rec.n}")
    return crossover_value(cube_rec.value, square_rec.value)


def crossover_table(
    squares: Iterable[PseudoRecord], cubes: Iterable[PseudoRecord]
) -> list[tuple[int, float]]:
    """(n, crossover ratio) for every n present in both record sets."""
    sq = {r.n: r for r in squares}
    out = []
    for rec in cubes:
        if rec.n in sq:
            out.append((rec.n, crossover_value(rec.value, sq[rec.n].value)))
    return sorted(out)


def table_stats(values: Iterable[float]) -> tuple[float, float, float]:
    """(min, max, mean) of a nonempty sequence."""
    vals = list(values)
    if not vals:
        raise InvalidRecordError("no values to summarize")
    return min(vals), max(vals), sum(vals) / len(vals)
