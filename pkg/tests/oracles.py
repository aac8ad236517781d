"""Independent reference computations used only by the tests."""

import math
from fractions import Fraction

import gmpy2
import numpy as np


def digits_ok(n, B, width=None):
    s = str(n) if width is None else str(n).zfill(width)
    return not any(int(c) in B for c in s)


def direct_sum_exact(k, B, theta, prec=160):
    """Normalised ``|sum_{n < 10^k padded-admissible} e(n theta)|`` in ``prec``-bit arithmetic.

    ``theta`` is a float; it is exactly a dyadic rational, and ``n theta`` is
    reduced mod 1 with integer arithmetic on that rational.
    """
    fr = Fraction(float(theta))
    num, den = fr.numerator, fr.denominator
    allowed = [b for b in range(10) if b not in B]
    ctx = gmpy2.get_context()
    old = ctx.precision
    ctx.precision = prec
    try:
        two_pi_over = 2 * gmpy2.const_pi() / den
        re = gmpy2.mpfr(0)
        im = gmpy2.mpfr(0)
        count = 0
        stack = [0]
        for _ in range(k):
            stack = [10 * s + b for s in stack for b in allowed]
        for n in stack:
            sn, cs = gmpy2.sin_cos(two_pi_over * ((n * num) % den))
            re += cs
            im += sn
            count += 1
        return float(gmpy2.sqrt(re * re + im * im) / len(allowed) ** k)
    finally:
        ctx.precision = old


def product_mp(k, B, theta, dps=40):
    import mpmath

    fr = Fraction(theta) if not isinstance(theta, Fraction) else theta
    allowed = [b for b in range(10) if b not in B]
    with mpmath.workdps(dps):
        t = mpmath.mpf(fr.numerator) / fr.denominator
        out = mpmath.mpf(1)
        for j in range(k):
            out *= abs(sum(mpmath.expj(2 * mpmath.pi * b * t * 10**j) for b in allowed)) / len(allowed)
        return float(out)


def rho_ell_scan(ell, d):
    return sum(1 for nu in range(d) if (nu * nu + ell * ell) % d == 0)


def tau(n):
    c = 0
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            c += 1 if i * i == n else 2
    return c


def is_prime_trial(n):
    if n < 2:
        return False
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return False
    return True


def von_mangoldt_trial(n):
    if n < 2:
        return 0.0
    for p in range(2, n + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return math.log(p) if n == 1 else 0.0
    return 0.0


def mobius_trial(n):
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def s_of_x_double_loop(x, P, B):
    """``sum a(n) Lambda(n)`` by looping over every ``(m, l)``."""
    ps = [p for p in range(2, P + 1) if is_prime_trial(p)]
    r = math.isqrt(x)
    total = 0.0
    for ell in range(r + 1):
        if not digits_ok(ell, B) or any(ell % p == 0 for p in ps):
            continue
        for m in range(-r, r + 1):
            n = m * m + ell * ell
            if n <= x:
                total += von_mangoldt_trial(n)
    return total


def congruence_oracle(x, P, B, D):
    """``(A_d, M_d)`` for ``d <= D`` by direct loops and scanned root counts."""
    ps = [p for p in range(2, P + 1) if is_prime_trial(p)]
    r = math.isqrt(x)
    ells = [e for e in range(r + 1) if digits_ok(e, B) and not any(e % p == 0 for p in ps)]
    A = np.zeros(D)
    M = np.zeros(D)
    for e in ells:
        row = 2 * math.isqrt(x - e * e) + 1
        for d in range(1, D + 1):
            M[d - 1] += row * rho_ell_scan(e, d) / d
        top = math.isqrt(x - e * e)
        for m in range(-top, top + 1):
            n = m * m + e * e
            for d in range(1, D + 1):
                if n % d == 0:
                    A[d - 1] += 1
    return A, M
