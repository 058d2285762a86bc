"""Small deterministic prime utilities (sieve-backed, no probabilistic tests)."""

from bisect import bisect_right
from itertools import count


def primes_up_to(n: int) -> list[int]:
    """Return all primes <= n by a byte sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i in range(2, n + 1) if sieve[i]]


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division; intended for small n."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def nth_prime(n: int) -> int:
    """The n-th prime, 1-indexed (nth_prime(1) == 2)."""
    if n < 1:
        raise ValueError(f"prime index must be >= 1, got {n}")
    bound = 16
    while True:
        ps = primes_up_to(bound)
        if len(ps) >= n:
            return ps[n - 1]
        bound *= 2


def nth_prime_1mod3(n: int) -> int:
    """The n-th prime congruent to 1 mod 3, 1-indexed (first is 7)."""
    if n < 1:
        raise ValueError(f"prime index must be >= 1, got {n}")
    bound = 32
    while True:
        ps = [p for p in primes_up_to(bound) if p % 3 == 1]
        if len(ps) >= n:
            return ps[n - 1]
        bound *= 2


def prime_index(p: int) -> int:
    """Inverse of nth_prime; raises if p is not prime."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return len(primes_up_to(p))


def prime_index_1mod3(q: int) -> int:
    """Inverse of nth_prime_1mod3; raises if q is not a prime = 1 mod 3."""
    if not is_prime(q) or q % 3 != 1:
        raise ValueError(f"{q} is not a prime congruent to 1 mod 3")
    return sum(1 for p in primes_up_to(q) if p % 3 == 1)


def odd_primes_up_to(n: int) -> list[int]:
    return [p for p in primes_up_to(n) if p > 2]


def primes_1mod3_up_to(n: int) -> list[int]:
    return [p for p in primes_up_to(n) if p % 3 == 1]


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    for c in count(max(n, 1) + 1):
        if is_prime(c):
            return c


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo < p <= hi."""
    ps = primes_up_to(hi)
    return ps[bisect_right(ps, lo) :]
