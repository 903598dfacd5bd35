"""Small elementary-number-theory helpers shared across modules."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

__all__ = [
    "divisors",
    "prime_factors",
    "is_squarefree",
    "psi",
    "num_divisors",
    "sigma",
    "sigma_table",
    "egcd",
]


@lru_cache(maxsize=4096)
def divisors(n: int) -> tuple[int, ...]:
    """Positive divisors of ``n`` in increasing order."""
    if n <= 0:
        raise ValueError(f"divisors() needs a positive integer, got {n}")
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return tuple(small + large[::-1])


def prime_factors(n: int) -> dict[int, int]:
    if n <= 0:
        raise ValueError(f"prime_factors() needs a positive integer, got {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in prime_factors(n).values())


def psi(n: int) -> int:
    """Index of Gamma_0(n) in SL_2(Z): n * prod_{p | n} (1 + 1/p)."""
    out = n
    for p in prime_factors(n):
        out = out // p * (p + 1)
    return out


def num_divisors(n: int) -> int:
    return len(divisors(n))


def sigma(n: int, k: int = 1) -> int:
    """Divisor power sum sigma_k(n); zero for non-positive or non-integral n."""
    if n <= 0:
        return 0
    return sum(d**k for d in divisors(n))


@lru_cache(maxsize=64)
def sigma_table(limit: int, k: int = 1) -> tuple[int, ...]:
    """sigma_k(n) for 0 <= n < limit by sieving (entry 0 is 0)."""
    table = [0] * max(limit, 1)
    for d in range(1, limit):
        dk = d**k
        for multiple in range(d, limit, d):
            table[multiple] += dk
    return tuple(table)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g == gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
