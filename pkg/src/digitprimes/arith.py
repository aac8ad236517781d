"""Elementary arithmetic tables: primes, prime powers, von Mangoldt, Moebius."""

import math
from functools import lru_cache

import numpy as np
import sympy

from .kernels import mobius_table

VON_MANGOLDT_MAX = 2 * 10**18


def prime_sieve(n):
    """Boolean array ``is_prime[0..n]``."""
    n = int(n)
    is_prime = np.ones(max(n + 1, 2), dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return is_prime[:n + 1]


def primes_up_to(n):
    return np.flatnonzero(prime_sieve(n)).astype(np.int64)


def proper_prime_powers(n, primes=None):
    """Sorted ``p^k <= n`` with ``k >= 2``, and the matching ``log p``."""
    if primes is None:
        primes = primes_up_to(math.isqrt(n))
    vals, logs = [], []
    for p in primes.tolist():
        if p * p > n:
            break
        q = p * p
        while q <= n:
            vals.append(q)
            logs.append(math.log(p))
            q *= p
    order = np.argsort(vals, kind="stable")
    return (np.asarray(vals, dtype=np.int64)[order],
            np.asarray(logs, dtype=np.float64)[order])


def von_mangoldt(n):
    """``log p`` when ``n = p^k`` (``k >= 1``), else ``0``.

    Exact for ``1 <= n <= 2e18``: the largest perfect-power root is extracted
    and tested with a primality test that is deterministic below ``2^64``.
    """
    n = int(n)
    if n < 1 or n > VON_MANGOLDT_MAX:
        raise ValueError(f"von_mangoldt defined here for 1 <= n <= {VON_MANGOLDT_MAX}, got {n}")
    if n == 1:
        return 0.0
    pp = sympy.perfect_power(n)
    base = int(pp[0]) if pp else n
    return math.log(base) if sympy.isprime(base) else 0.0


def von_mangoldt_table(n, is_prime=None):
    """``Lambda[0..n]`` as float64."""
    if is_prime is None:
        is_prime = prime_sieve(n)
    lam = np.zeros(n + 1)
    for p in np.flatnonzero(is_prime).tolist():
        lp = math.log(p)
        q = p
        while q <= n:
            lam[q] = lp
            q *= p
    return lam


def mobius(n):
    return mobius_table(n)


@lru_cache(maxsize=1 << 16)
def factorint(n):
    """Prime factorisation as a sorted tuple of ``(p, e)``."""
    return tuple(sorted((int(p), int(e)) for p, e in sympy.factorint(int(n)).items()))


def square_root_part_table(n, primes=None):
    """``r[d]`` = largest ``r`` with ``r^2 | d``, for ``d <= n``."""
    r = np.ones(n + 1, dtype=np.int64)
    r[0] = 0
    if primes is None:
        primes = primes_up_to(math.isqrt(n))
    for p in primes.tolist():
        q = p * p
        if q > n:
            break
        while q <= n:
            r[q::q] *= p
            q *= p * p
    return r


def smallest_prime_factor_table(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for p in range(2, n + 1):
        if p * p > n:
            break
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = spf == 0
    rest[0] = False
    spf[rest] = np.flatnonzero(rest)
    return spf
