"""Hot inner loops of the sieve side.

Every kernel comes in two flavours, ``_<name>_nb`` (numba ``@njit``) and
``_<name>_np`` (vectorised numpy).  The public wrapper picks one at call time
via :func:`digitprimes._accel.numba_enabled`, so toggling the environment flag
between calls takes effect immediately.  Both flavours must agree exactly on
integer outputs; float outputs are per-block partials that callers reduce with
``math.fsum`` so the final sums agree to rounding.
"""

import math

import numpy as np

from ._accel import njit, numba_enabled


# lattice point weights a(n) -------------------------------------------------

@njit(cache=True)
def _lattice_counts_nb(ells, x):
    out = np.zeros(x + 1, dtype=np.int32)
    for i in range(ells.shape[0]):
        l2 = ells[i] * ells[i]
        if l2 > x:
            continue
        out[l2] += 1
        m = 1
        while l2 + m * m <= x:
            out[l2 + m * m] += 2
            m += 1
    return out


def _lattice_counts_np(ells, x):
    out = np.zeros(x + 1, dtype=np.int32)
    for ell in ells.tolist():
        l2 = ell * ell
        if l2 > x:
            continue
        out[l2] += 1
        top = math.isqrt(x - l2)
        if top:
            m = np.arange(1, top + 1, dtype=np.int64)
            out[m * m + l2] += 2
    return out


def lattice_counts(ells, x):
    """Return ``a`` with ``a[n] = #{(m, l): m in Z, l in ells, m^2 + l^2 = n}``."""
    ells = np.ascontiguousarray(ells, dtype=np.int64)
    if numba_enabled():
        return _lattice_counts_nb(ells, int(x))
    return _lattice_counts_np(ells, int(x))


# von Mangoldt weighted lattice walk ------------------------------------------

@njit(cache=True, nogil=True)
def _lattice_lambda_nb(ells, x, is_prime, pp_vals, pp_logs):
    total = np.zeros(ells.shape[0])
    prime = np.zeros(ells.shape[0])
    npp = pp_vals.shape[0]
    for i in range(ells.shape[0]):
        l2 = ells[i] * ells[i]
        if l2 > x:
            continue
        m = 0
        while l2 + m * m <= x:
            n = l2 + m * m
            w = 1.0 if m == 0 else 2.0
            if is_prime[n]:
                v = w * math.log(n)
                total[i] += v
                prime[i] += v
            elif npp > 0:
                j = np.searchsorted(pp_vals, n)
                if j < npp and pp_vals[j] == n:
                    total[i] += w * pp_logs[j]
            m += 1
    return total, prime


def _lattice_lambda_np(ells, x, is_prime, pp_vals, pp_logs):
    total = np.zeros(ells.shape[0])
    prime = np.zeros(ells.shape[0])
    npp = pp_vals.shape[0]
    for i, ell in enumerate(ells.tolist()):
        l2 = ell * ell
        if l2 > x:
            continue
        m = np.arange(0, math.isqrt(x - l2) + 1, dtype=np.int64)
        n = m * m + l2
        w = np.where(m == 0, 1.0, 2.0)
        isp = is_prime[n]
        lam_p = np.where(isp, np.log(n.astype(np.float64)), 0.0)
        lam = lam_p
        if npp:
            j = np.minimum(np.searchsorted(pp_vals, n), npp - 1)
            hit = (pp_vals[j] == n) & ~isp
            lam = lam_p + np.where(hit, pp_logs[j], 0.0)
        total[i] = float(np.dot(w, lam))
        prime[i] = float(np.dot(w, lam_p))
    return total, prime


def lattice_lambda_partials(ells, x, is_prime, pp_vals, pp_logs):
    """Per-``l`` sums of ``Lambda(m^2 + l^2)`` over ``m^2 + l^2 <= x``.

    Returns ``(total, prime_only)`` arrays aligned with ``ells``; ``pp_vals``
    are the proper prime powers ``p^k`` (``k >= 2``) up to ``x``, sorted, and
    ``pp_logs`` the matching ``log p``.
    """
    ells = np.ascontiguousarray(ells, dtype=np.int64)
    pp_vals = np.ascontiguousarray(pp_vals, dtype=np.int64)
    pp_logs = np.ascontiguousarray(pp_logs, dtype=np.float64)
    if numba_enabled():
        return _lattice_lambda_nb(ells, int(x), is_prime, pp_vals, pp_logs)
    return _lattice_lambda_np(ells, int(x), is_prime, pp_vals, pp_logs)


# Moebius function ------------------------------------------------------------

@njit(cache=True)
def _mobius_nb(n):
    mu = np.zeros(n + 1, dtype=np.int8)
    if n >= 1:
        mu[1] = 1
    composite = np.zeros(n + 1, dtype=np.bool_)
    primes = np.empty(max(n // 2 + 1, 1), dtype=np.int64)
    count = 0
    for i in range(2, n + 1):
        if not composite[i]:
            primes[count] = i
            count += 1
            mu[i] = -1
        for j in range(count):
            p = primes[j]
            if i * p > n:
                break
            composite[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def _mobius_np(n):
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    if n < 2:
        return mu
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    for p in np.flatnonzero(sieve).tolist():
        mu[p::p] *= -1
        if p * p <= n:
            mu[p * p::p * p] = 0
    return mu


def mobius_table(n):
    """``mu[0..n]`` as int8 (``mu[0] = 0``)."""
    n = int(n)
    if numba_enabled():
        return _mobius_nb(n)
    return _mobius_np(n)


# truncated Dirichlet convolutions --------------------------------------------

@njit(cache=True)
def _divisor_accumulate_nb(dvals, coef, g, n):
    out = np.zeros(n + 1)
    for i in range(dvals.shape[0]):
        d = dvals[i]
        c = coef[i]
        k = 1
        while d * k <= n:
            out[d * k] += c * g[k]
            k += 1
    return out


def _divisor_accumulate_np(dvals, coef, g, n):
    out = np.zeros(n + 1)
    for d, c in zip(dvals.tolist(), coef.tolist()):
        top = n // d
        if top:
            out[d::d] += c * g[1:top + 1]
    return out


def divisor_accumulate(dvals, coef, g, n):
    """``out[m] = sum_{d in dvals, d | m} coef_d * g[m / d]`` for ``m <= n``.

    This is the convolution of the function supported on ``dvals`` (values
    ``coef``) with ``g``; ``g`` must have length at least ``n + 1``.
    """
    dvals = np.ascontiguousarray(dvals, dtype=np.int64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    if numba_enabled():
        return _divisor_accumulate_nb(dvals, coef, g, int(n))
    return _divisor_accumulate_np(dvals, coef, g, int(n))


@njit(cache=True)
def _conv_dot_nb(dvals, coef, g, a):
    n = a.shape[0] - 1
    out = np.zeros(dvals.shape[0])
    for i in range(dvals.shape[0]):
        d = dvals[i]
        s = 0.0
        k = 1
        while d * k <= n:
            s += g[k] * a[d * k]
            k += 1
        out[i] = coef[i] * s
    return out


def _conv_dot_np(dvals, coef, g, a):
    n = a.shape[0] - 1
    out = np.zeros(dvals.shape[0])
    for i, d in enumerate(dvals.tolist()):
        top = n // d
        if top:
            out[i] = coef[i] * float(np.sum(g[1:top + 1] * a[d::d][:top]))
    return out


def conv_dot_partials(dvals, coef, g, a):
    """Per-``d`` partials of ``sum_n a[n] (f * g)(n)`` with ``f`` on ``dvals``.

    Entry ``i`` is ``coef_i * sum_k g[k] a[d_i k]``; summing the array gives
    the weighted convolution sum without materialising ``f * g``.
    """
    dvals = np.ascontiguousarray(dvals, dtype=np.int64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    a = np.ascontiguousarray(a, dtype=np.float64)
    if numba_enabled():
        return _conv_dot_nb(dvals, coef, g, a)
    return _conv_dot_np(dvals, coef, g, a)


# direct exponential sums ----------------------------------------------------

_TWO_PI_HI = 2 * math.pi
_TWO_PI_LO = 2.4492935982947030e-16
_SPLIT = 134217729.0


@njit(cache=True)
def _two_pi_times(ph):
    # 2 pi ph rounded once: Dekker two-product against hi + lo
    p = ph * _TWO_PI_HI
    t = _SPLIT * ph
    a_hi = t - (t - ph)
    a_lo = ph - a_hi
    t = _SPLIT * _TWO_PI_HI
    b_hi = t - (t - _TWO_PI_HI)
    b_lo = _TWO_PI_HI - b_hi
    err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p + (err + ph * _TWO_PI_LO)


@njit(cache=True)
def _direct_sums_nb(n, m):
    re = np.zeros(m.shape[0])
    im = np.zeros(m.shape[0])
    scale = 2.0**-64
    for j in range(m.shape[0]):
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        mj = m[j]
        for i in range(n.shape[0]):
            ang = _two_pi_times(float(mj * n[i]) * scale)
            c = math.cos(ang)
            s = math.sin(ang)
            # Neumaier compensated accumulation
            t = sr + c
            if abs(sr) >= abs(c):
                cr += (sr - t) + c
            else:
                cr += (c - t) + sr
            sr = t
            t = si + s
            if abs(si) >= abs(s):
                ci += (si - t) + s
            else:
                ci += (s - t) + si
            si = t
        re[j] = sr + cr
        im[j] = si + ci
    return re, im


def _two_pi_times_np(ph):
    p = ph * _TWO_PI_HI
    t = _SPLIT * ph
    a_hi = t - (t - ph)
    a_lo = ph - a_hi
    t = _SPLIT * _TWO_PI_HI
    b_hi = t - (t - _TWO_PI_HI)
    b_lo = _TWO_PI_HI - b_hi
    err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p + (err + ph * _TWO_PI_LO)


two_pi_times = _two_pi_times_np


def _direct_sums_np(n, m, chunk_terms=1 << 22):
    re = np.empty(m.shape[0])
    im = np.empty(m.shape[0])
    step = max(1, chunk_terms // max(n.shape[0], 1))
    for s in range(0, m.shape[0], step):
        with np.errstate(over="ignore"):
            ph = (m[s:s + step, None] * n[None, :]).astype(np.float64) * 2.0**-64
        ang = _two_pi_times_np(ph)
        re[s:s + step] = [math.fsum(r) for r in np.cos(ang)]
        im[s:s + step] = [math.fsum(r) for r in np.sin(ang)]
    return re, im


def direct_sums(n, m):
    """``sum_i e(n_i theta_j)`` for fixed-point phases ``m_j = theta_j 2^64``.

    ``n`` and ``m`` are uint64; ``n_i m_j`` wraps mod ``2^64``, i.e. the
    phase is reduced mod 1 exactly.  Returns ``(real, imag)`` arrays.
    """
    n = np.ascontiguousarray(n, dtype=np.uint64)
    m = np.ascontiguousarray(m, dtype=np.uint64)
    if numba_enabled():
        return _direct_sums_nb(n, m)
    return _direct_sums_np(n, m)
