"""Wheel data structures: factored moduli with per-factor admissible residues.

A wheel over M = f1*f2*...*fk stores one sorted residue list per factor and
enumerates, in O(output) time and O(sum of list sizes) memory, every t in a
window whose residue mod each factor is admissible. Admissible sets encode
"x = t_p*M_n - t_n*M_p satisfies the residue condition at this factor", with
the scaling by the opposite modulus folded into the stored residues, so
enumeration itself is pure CRT stepping.
"""

from dataclasses import dataclass, field
from math import gcd, prod

import numpy as np

from .errors import EmptyWheelError, InvalidConfigurationError, InvalidModulusError
from .modarith import legendre_symbol, mod_inverse, powmod

SQUARE = "square"
CUBE = "cube"
MODES = (SQUARE, CUBE)

# Production moduli factor lists, sized for 64-bit products. Between wheel
# factors, normalized primes and the secondary filter they cover every
# residue condition of a production-scale run.
PRODUCTION_SQUARE_TP = (7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 53, 89)
PRODUCTION_SQUARE_TN = (8, 3, 5, 47, 59, 61, 67, 71, 73, 79, 83, 97)
PRODUCTION_CUBE_TP = (2, 7, 13, 31, 43, 73, 79, 127, 139, 157, 181)
PRODUCTION_CUBE_TN = (9, 19, 37, 61, 67, 97, 103, 109, 151, 163)

# Above this many period residues the dense-array enumeration path would
# materialize too much; windows then enumerate a restrictive factor subset
# densely and apply the remaining factors as vectorized masks.
_ARRAY_PERIOD_CAP = 1 << 22

# Factors whose square fits int64 are safe in the vectorized CRT combine;
# bigger ones can only participate as membership masks.
_DENSE_FACTOR_LIMIT = 1 << 31

# Leftover factors up to this size test membership through a boolean table;
# larger ones fall back to sorted-array membership.
_MASK_TABLE_LIMIT = 1 << 20


def _smallest_prime_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return d
        d += 2
    return n


def _is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = _smallest_prime_factor(n)
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class FactoredModulus:
    """A modulus held as pairwise-coprime prime-power factors."""

    factors: tuple[int, ...]
    product: int

    def __post_init__(self):
        if not self.factors:
            raise InvalidModulusError("at least one factor required")
        for f in self.factors:
            if not 2 <= f < 2**32:
                raise InvalidModulusError(f"factor {f} out of range [2, 2^32)")
            if not _is_prime_power(f):
                raise InvalidModulusError(f"factor {f} is not a prime power")
        for i, a in enumerate(self.factors):
            for b in self.factors[i + 1 :]:
                if gcd(a, b) != 1:
                    raise InvalidModulusError(f"factors {a} and {b} share a prime")
        if self.product != prod(self.factors):
            raise InvalidModulusError("product does not match factors")
        if self.product >= 2**64:
            raise InvalidModulusError("product must be < 2^64")

    @classmethod
    def from_factors(cls, factors) -> "FactoredModulus":
        factors = tuple(int(f) for f in factors)
        return cls(factors, prod(factors))


def target_residues(mode: str, factor: int) -> list[int]:
    """Residues r mod factor such that x = r satisfies the mode's condition.

    square: x = 1 mod 8 at the 2-power factors, nonzero quadratic residue at
    odd primes. cube: x odd at 2, x = +-1 at 9 (or 3), nonzero cubic residue
    at primes (for q = 2 mod 3 every nonzero residue is a cube, which leaves
    exactly the gcd condition).
    """
    if mode == SQUARE:
        if factor in (2, 4, 8):
            return [1]
        if factor % 2 == 0:
            raise InvalidConfigurationError(f"even factor {factor} unsupported for squares")
        return [r for r in range(1, factor) if legendre_symbol(r, factor) == 1]
    if mode == CUBE:
        if factor == 2:
            return [1]
        if factor in (3, 9):
            return sorted({1 % factor, (factor - 1) % factor})
        if factor % 3 == 1:
            e = (factor - 1) // 3
            return [r for r in range(1, factor) if powmod(r, e, factor) == 1]
        return list(range(1, factor))
    raise InvalidConfigurationError(f"unknown mode {mode!r}")


def admissible_tp_residues(mode: str, factor: int, m_n: int) -> list[int]:
    """Sorted s mod factor with s*M_n in the target set mod factor."""
    inv = mod_inverse(m_n % factor, factor)
    return sorted(r * inv % factor for r in target_residues(mode, factor))


def admissible_tn_residues(mode: str, factor: int, m_p: int) -> list[int]:
    """Sorted s mod factor with -s*M_p in the target set mod factor."""
    inv = mod_inverse(m_p % factor, factor)
    return sorted(-r * inv % factor for r in target_residues(mode, factor))


class Wheel:
    """Validated per-factor residue lists plus the CRT stepping plan."""

    def __init__(self, modulus: FactoredModulus, residues):
        cleaned = []
        for f, rs in zip(modulus.factors, residues):
            rs = sorted(set(int(r) for r in rs))
            if not rs:
                raise EmptyWheelError(f"no admissible residues at factor {f}")
            if rs[0] < 0 or rs[-1] >= f:
                raise InvalidConfigurationError(f"residue out of range for factor {f}")
            cleaned.append(tuple(rs))
        if len(cleaned) != len(modulus.factors):
            raise InvalidConfigurationError("one residue list per factor required")
        self.modulus = modulus
        self.residues: tuple[tuple[int, ...], ...] = tuple(cleaned)
        self.period_count = prod(len(rs) for rs in cleaned)
        # Largest factors first: prefix products grow fastest, so window
        # pruning cuts branches as early as possible.
        order = sorted(range(len(cleaned)), key=lambda i: -modulus.factors[i])
        plan = []
        prefix = 1
        for i in order:
            f = modulus.factors[i]
            plan.append((f, prefix, mod_inverse(prefix % f, f), cleaned[i]))
            prefix *= f
        self._plan = plan
        self._period_residues: np.ndarray | None = None
        self._window_plan: tuple | None = None

    @property
    def density(self) -> float:
        return self.period_count / self.modulus.product


def build_wheel(modulus: FactoredModulus, residues) -> Wheel:
    return Wheel(modulus, residues)


def build_tp_wheel(mode: str, m_p: FactoredModulus, m_n_product: int) -> Wheel:
    return Wheel(m_p, [admissible_tp_residues(mode, f, m_n_product) for f in m_p.factors])


def build_tn_wheel(mode: str, m_n: FactoredModulus, m_p_product: int) -> Wheel:
    return Wheel(m_n, [admissible_tn_residues(mode, f, m_p_product) for f in m_n.factors])


def production_moduli(mode: str) -> tuple[FactoredModulus, FactoredModulus]:
    """The 64-bit production (M_p, M_n) pair for the given mode."""
    if mode == SQUARE:
        return (
            FactoredModulus.from_factors(PRODUCTION_SQUARE_TP),
            FactoredModulus.from_factors(PRODUCTION_SQUARE_TN),
        )
    if mode == CUBE:
        return (
            FactoredModulus.from_factors(PRODUCTION_CUBE_TP),
            FactoredModulus.from_factors(PRODUCTION_CUBE_TN),
        )
    raise InvalidConfigurationError(f"unknown mode {mode!r}")


def wheel_enumerate(wheel: Wheel, lo: int, hi: int):
    """Yield each admissible t in [lo, hi) exactly once, unordered."""
    if lo >= hi:
        return
    plan = wheel._plan
    depth = len(plan)
    m_full = wheel.modulus.product

    def rec(i: int, r: int, m: int):
        if i == depth:
            first = lo + (r - lo) % m_full
            yield from range(first, hi, m_full)
            return
        f, prefix, inv, rs = plan[i]
        m2 = m * f
        for s in rs:
            r2 = r + prefix * ((s - r) * inv % f)
            if lo + (r2 - lo) % m2 < hi:
                yield from rec(i + 1, r2, m2)

    yield from rec(0, 0, 1)


def _period_residues(wheel: Wheel) -> np.ndarray:
    """All admissible residues mod the full product, sorted (cached)."""
    if wheel._period_residues is None:
        res = np.zeros(1, dtype=np.int64)
        for f, prefix, inv, rs in wheel._plan:
            steps = np.array(rs, dtype=np.int64)
            # r2 = r + prefix * ((s - r) * inv % f) for every (r, s) pair;
            # reducing mod f before the inv multiply keeps products in int64.
            shift = (steps[:, None] - res[None, :]) % f * inv % f
            res = (res[None, :] + prefix * shift).ravel()
        res.sort()
        wheel._period_residues = res
    return wheel._period_residues


def _dense_window(wheel: Wheel, lo: int, hi: int) -> np.ndarray:
    """Window slice of the cached full-period residue array."""
    res = _period_residues(wheel)
    m = wheel.modulus.product
    k_lo, k_hi = lo // m, (hi - 1) // m
    if k_lo == k_hi:
        base = res + k_lo * m
        return base[np.searchsorted(base, lo) : np.searchsorted(base, hi)]
    parts = []
    for k in range(k_lo, k_hi + 1):
        base = res + k * m
        if k == k_lo:
            base = base[np.searchsorted(base, lo) :]
        elif k == k_hi:
            base = base[: np.searchsorted(base, hi)]
        parts.append(base)
    return np.concatenate(parts)


def _window_plan(wheel: Wheel):
    """Split into (dense sub-wheel, leftover mask factors), cached.

    The most restrictive factors join the dense subset until its residue
    count would pass the cap; the rest become per-factor membership masks.
    An unconstrained factor (full residue set) masks nothing and is dropped.
    """
    if wheel._window_plan is None:
        pairs = sorted(
            zip(wheel.modulus.factors, wheel.residues), key=lambda p: len(p[1]) / p[0]
        )
        subset: list[tuple[int, tuple[int, ...]]] = []
        masks = []
        count = 1
        for f, rs in pairs:
            if f < _DENSE_FACTOR_LIMIT and count * len(rs) <= _ARRAY_PERIOD_CAP:
                subset.append((f, rs))
                count *= len(rs)
            elif len(rs) < f:
                if f <= _MASK_TABLE_LIMIT:
                    table = np.zeros(f, dtype=bool)
                    table[list(rs)] = True
                    masks.append((f, table, None))
                else:
                    masks.append((f, None, np.array(rs, dtype=np.int64)))
        sub_wheel = None
        if subset and len(subset) < len(wheel.modulus.factors):
            sub_wheel = Wheel(
                FactoredModulus.from_factors([f for f, _ in subset]),
                [rs for _, rs in subset],
            )
        wheel._window_plan = (sub_wheel, masks)
    return wheel._window_plan


def enumerate_window_array(wheel: Wheel, lo: int, hi: int) -> np.ndarray:
    """Sorted int64 array of admissible t in [lo, hi). Requires hi <= 2^62.

    Wheels with a modest period slice a cached dense residue array; sparse
    giants enumerate a restrictive factor subset densely and mask the rest,
    which stays output-linear even when the full period is astronomical.
    """
    if lo >= hi:
        return np.empty(0, dtype=np.int64)
    if hi > 2**62:
        raise InvalidConfigurationError("window end exceeds the int64 safety range")
    if (
        wheel.period_count <= _ARRAY_PERIOD_CAP
        and max(wheel.modulus.factors) < _DENSE_FACTOR_LIMIT
    ):
        return _dense_window(wheel, lo, hi)
    sub_wheel, masks = _window_plan(wheel)
    if sub_wheel is None:
        out = np.fromiter(wheel_enumerate(wheel, lo, hi), dtype=np.int64)
        out.sort()
        return out
    vals = _dense_window(sub_wheel, lo, hi)
    for f, table, sorted_rs in masks:
        if len(vals) == 0:
            break
        if table is not None:
            vals = vals[table[vals % f]]
        else:
            vals = vals[np.isin(vals % f, sorted_rs)]
    return vals


def parse_factor_lines(text: str) -> list[tuple[int, list[int]]]:
    """Parse "factor r1 r2 ..." lines; '#' comments and blank lines allowed."""
    out = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError as exc:
            raise InvalidConfigurationError(f"line {ln}: non-integer token") from exc
        if len(nums) < 2:
            raise InvalidConfigurationError(f"line {ln}: need a factor and at least one residue")
        out.append((nums[0], nums[1:]))
    return out


def parse_moduli_config(text: str) -> dict[str, list[tuple[int, list[int]]]]:
    """Parse a two-wheel config with [tp] and [tn] sections of factor lines."""
    sections: dict[str, list[str]] = {"tp": [], "tn": []}
    current: str | None = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            name = line.strip("[]").strip().lower()
            if name not in sections:
                raise InvalidConfigurationError(f"unknown section [{name}]")
            current = name
            continue
        if current is None:
            raise InvalidConfigurationError("factor line before any [tp]/[tn] section")
        sections[current].append(line)
    if not sections["tp"] or not sections["tn"]:
        raise InvalidConfigurationError("config must define both [tp] and [tn] sections")
    return {side: parse_factor_lines("\n".join(lines)) for side, lines in sections.items()}


def format_moduli_config(tp: list[tuple[int, list[int]]], tn: list[tuple[int, list[int]]]) -> str:
    lines = ["[tp]"]
    lines += [" ".join(map(str, (f, *rs))) for f, rs in tp]
    lines.append("[tn]")
    lines += [" ".join(map(str, (f, *rs))) for f, rs in tn]
    return "\n".join(lines) + "\n"
