"""Exact modular and integer arithmetic primitives.

Everything here is exact integer math: no floats escape, and any float used
internally (the cube-root seed) is followed by integer correction loops.
"""

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import InvalidModulusError, NotInvertibleError


@dataclass(frozen=True)
class ResidueClass:
    """A residue value modulo a positive modulus, stored reduced."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidModulusError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def __mul__(self, other: "ResidueClass") -> "ResidueClass":
        if self.modulus != other.modulus:
            raise InvalidModulusError("residue classes have different moduli")
        return ResidueClass(self.value * other.value, self.modulus)

    def inverse(self) -> "ResidueClass":
        return ResidueClass(mod_inverse(self.value, self.modulus), self.modulus)


def mulmod(a: int, b: int, m: int) -> int:
    """(a * b) mod m without overflow for any operand size."""
    if m < 1:
        raise InvalidModulusError(f"modulus must be >= 1, got {m}")
    return (a * b) % m


def powmod(base: int, exp: int, m: int) -> int:
    """base**exp mod m by square-and-multiply (builtin pow)."""
    if m < 1:
        raise InvalidModulusError(f"modulus must be >= 1, got {m}")
    if exp < 0:
        raise ValueError(f"exponent must be >= 0, got {exp}")
    return pow(base, exp, m)


def mod_inverse(a: int, m: int) -> int:
    """Multiplicative inverse of a mod m; raises if gcd(a, m) != 1."""
    if m < 1:
        raise InvalidModulusError(f"modulus must be >= 1, got {m}")
    g = gcd(a, m)
    if g != 1:
        raise NotInvertibleError(f"{a} is not invertible mod {m} (gcd {g})")
    return pow(a, -1, m)


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) for odd prime p, by Euler's criterion.

    Returns 1 if a is a nonzero quadratic residue mod p, -1 if a nonresidue,
    0 if p divides a.
    """
    if p < 3 or p % 2 == 0:
        raise ValueError(f"p must be an odd prime >= 3, got {p}")
    ls = pow(a % p, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


def is_cubic_residue(a: int, q: int) -> bool:
    """True iff a is a nonzero cubic residue mod the prime q = 1 mod 3.

    Uses the criterion a**((q-1)/3) == 1 mod q; zero is not counted.
    """
    if q % 3 != 1:
        raise ValueError(f"q must be a prime congruent to 1 mod 3, got {q}")
    return pow(a % q, (q - 1) // 3, q) == 1


def integer_nth_root(x: int, n: int) -> int:
    """floor(x ** (1/n)) computed exactly for n in {2, 3} and x >= 0.

    n=2 is math.isqrt. n=3 seeds from the float cube root, then runs exact
    integer correction loops, so it stays correct far past 2**127 where the
    float alone would round to the wrong integer.
    """
    if n == 2:
        return isqrt(x)
    if n != 3:
        raise ValueError(f"only n in {{2, 3}} supported, got {n}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0
    r = round(float(x) ** (1.0 / 3.0)) if x.bit_length() <= 300 else 1 << (x.bit_length() // 3 + 1)
    # Newton steps converge in a handful of iterations from either seed.
    while True:
        r2 = (2 * r + x // (r * r)) // 3
        if r2 >= r:
            break
        r = r2
    while r * r * r > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return r


def is_perfect_square(x: int) -> bool:
    if x < 0:
        return False
    r = isqrt(x)
    return r * r == x


def is_perfect_cube(x: int) -> bool:
    if x < 0:
        return False
    r = integer_nth_root(x, 3)
    return r * r * r == x
