"""Doubly-focused decomposition x = t_p*M_n - t_n*M_p and its block machinery.

With gcd(M_p, M_n) = 1, every integer x >= 0 has exactly one representation
with 0 <= t_n < M_n (then t_p = (x + t_n*M_p) / M_n is forced). Searching
[X_lo, X_hi] therefore reduces to walking admissible t_p blocks in sorted
order and, per admissible t_n, binary-searching the t_p range whose
recombination lands in the window. Bounds are kept in division form so the
hot path never forms t_p*M_n or t_n*M_p.
"""

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import BlockOverflowError, InvalidConfigurationError
from .modarith import mod_inverse
from .wheel import MODES, FactoredModulus, Wheel, enumerate_window_array

DEFAULT_BLOCK_CAP = 40_000_000


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class DfeParams:
    """Search-space geometry: moduli pair, inclusive x window, block cap."""

    mode: str
    m_p: FactoredModulus
    m_n: FactoredModulus
    x_lo: int
    x_hi: int
    block_cap: int = DEFAULT_BLOCK_CAP

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidConfigurationError(f"unknown mode {self.mode!r}")
        if gcd(self.m_p.product, self.m_n.product) != 1:
            raise InvalidConfigurationError("M_p and M_n must be coprime")
        if self.m_p.product >= 2**63 or self.m_n.product >= 2**63:
            raise InvalidConfigurationError("moduli must stay below 2^63")
        if not 0 <= self.x_lo < self.x_hi:
            raise InvalidConfigurationError(
                f"need 0 <= X_lo < X_hi, got [{self.x_lo}, {self.x_hi}]"
            )
        if self.x_hi >= 2**127:
            raise InvalidConfigurationError("X_hi must be < 2^127")
        if self.block_cap <= 0:
            raise InvalidConfigurationError("block cap must be positive")
        if self.tp_end > 2**62:
            raise InvalidConfigurationError("t_p range exceeds the 64-bit envelope")

    @property
    def tp_end(self) -> int:
        """Exclusive end of the t_p range covering x <= X_hi for every t_n."""
        return (self.x_hi + self.m_n.product * self.m_p.product) // self.m_n.product + 1


@dataclass(frozen=True)
class TpBlock:
    """Sorted admissible t_p values for one interval [lo, hi)."""

    lo: int
    hi: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.values) and not (self.lo <= int(self.values[0]) and int(self.values[-1]) < self.hi):
            raise InvalidConfigurationError("block values outside its interval")

    def __len__(self) -> int:
        return len(self.values)


def recombine(params: DfeParams, t_p: int, t_n: int) -> int:
    """x = t_p*M_n - t_n*M_p, exact at any size."""
    return t_p * params.m_n.product - t_n * params.m_p.product


def decompose(params: DfeParams, x: int) -> tuple[int, int]:
    """The unique (t_p, t_n) with 0 <= t_n < M_n recombining to x >= 0."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    mp, mn = params.m_p.product, params.m_n.product
    t_n = -x * mod_inverse(mp, mn) % mn
    t_p, rem = divmod(x + t_n * mp, mn)
    if rem:
        raise ArithmeticError("decomposition division was not exact")
    return t_p, t_n


def generate_tp_block(wheel: Wheel, lo: int, hi: int, cap: int = DEFAULT_BLOCK_CAP) -> TpBlock:
    """Materialize the sorted admissible t_p in [lo, hi); error above cap.

    The expected count is width * wheel.density; callers size intervals with
    headroom, and on overflow must shrink the interval and retry.
    """
    values = enumerate_window_array(wheel, lo, hi)
    if len(values) > cap:
        raise BlockOverflowError(f"block [{lo}, {hi}) holds {len(values)} > cap {cap}")
    return TpBlock(lo, hi, values)


def tn_window(params: DfeParams, block: TpBlock) -> tuple[int, int] | None:
    """Inclusive [tn_lo, tn_hi] that can pair with this block, or None.

    Derived from the extreme block values: t_n >= (t_p*M_n - X_hi)/M_p for
    the smallest t_p and t_n <= (t_p*M_n - X_lo)/M_p for the largest.
    """
    if len(block) == 0:
        return None
    mp, mn = params.m_p.product, params.m_n.product
    tn_lo = max(0, _ceil_div(int(block.values[0]) * mn - params.x_hi, mp))
    tn_hi = min(mn - 1, (int(block.values[-1]) * mn - params.x_lo) // mp)
    if tn_lo > tn_hi:
        return None
    return tn_lo, tn_hi


def match_tp_range(params: DfeParams, values: np.ndarray, t_n: int) -> tuple[int, int]:
    """Index half-open range [i, j) of values with X_lo <= x <= X_hi at t_n.

    Bounds are the division forms ceil((X_lo + t_n*M_p)/M_n) and
    floor((X_hi + t_n*M_p)/M_n); the array is only binary-searched, so no
    64-bit product is ever formed from its entries.
    """
    mp, mn = params.m_p.product, params.m_n.product
    shifted = t_n * mp
    tp_min = _ceil_div(params.x_lo + shifted, mn)
    tp_max = (params.x_hi + shifted) // mn
    if tp_min > tp_max:
        return 0, 0
    i = int(np.searchsorted(values, tp_min, side="left"))
    j = int(np.searchsorted(values, tp_max, side="right"))
    return i, j
