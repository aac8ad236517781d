"""Normalised exponential sums over digit-restricted integers.

For ``Y = 10^k`` the quantity ``F_Y(theta)`` is ``|sum_{n < Y, n in A} e(n theta)|``
divided by ``Y^gamma = (10 - |B|)^k``.  Under the padded convention it factors
over digit positions, ``F_{10^k}(theta) = prod_i f(10^i theta)`` with
``f(beta) = |sum_{b not in B} e(b beta)| / (10 - |B|)``, which every scan here
uses.

Phases are reduced modulo 1 without rounding drift: rational arguments
``a / q`` are stepped with exact integer arithmetic, and float arguments are
carried as 64-bit fixed point (multiples of ``2^-64``) so that multiplying by
``10^i`` or by ``n`` wraps exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .digits import GENUINE, PADDED, DigitConvention, as_excluded, member_array
from .kernels import direct_sums, two_pi_times

TWO64 = 2**64
# factors below this are recomputed in multiprecision: the float sum of
# unit terms has absolute error ~1e-16, too much relative error near zeros
REFINE_BELOW = 1e-4
REFINE_DPS = 30
MAX_DIRECT_K = 7

# large-sieve exponents: |B| = 1 uses the pair (27/77, 50/77)
ALPHA = {1: Fraction(27, 77), 2: Fraction(54, 125), 3: Fraction(99, 200)}


@dataclass(frozen=True)
class NormalizedSum:
    magnitude: float
    k: int
    theta: float


@dataclass
class ScanReport:
    B: str
    k: int
    q_or_Q: int
    grid: int
    measured: float
    reference: float
    kind: str = "single"
    margin: float = 0.0
    argmax_beta: float = 0.0

    @property
    def ratio(self) -> float:
        return self.measured / self.reference

    CSV_FIELDS = ("B", "k", "q_or_Q", "grid", "measured", "reference", "ratio")

    def csv_row(self) -> dict:
        return {"B": self.B, "k": self.k, "q_or_Q": self.q_or_Q, "grid": self.grid,
                "measured": repr(self.measured), "reference": repr(self.reference),
                "ratio": repr(self.ratio)}


def _allowed(B) -> np.ndarray:
    return np.array(as_excluded(B).allowed, dtype=np.float64)


def digit_factor(B, phases) -> np.ndarray:
    """``|sum_{b not in B} e(b phase)| / (10 - |B|)``, elementwise."""
    allowed = _allowed(B)
    ph = np.asarray(phases, dtype=np.float64)
    ang = 2 * np.pi * ph[..., None] * allowed
    re = np.cos(ang).sum(-1)
    im = np.sin(ang).sum(-1)
    return np.hypot(re, im) / allowed.size


def lipschitz_factor(B) -> float:
    """Lipschitz constant of :func:`digit_factor` in its phase."""
    allowed = _allowed(B)
    return float(2 * np.pi * allowed.sum() / allowed.size)


def to_fixed(theta) -> np.ndarray:
    """Reduce ``theta`` mod 1 to uint64 fixed point (units of ``2^-64``)."""
    if isinstance(theta, (Fraction, int)) or np.isscalar(theta):
        fr = Fraction(theta) if not isinstance(theta, Fraction) else theta
        return np.array([math.floor((fr - math.floor(fr)) * TWO64) % TWO64], dtype=np.uint64)
    th = np.asarray(theta, dtype=np.float64)
    a = np.abs(th)
    frac = a - np.floor(a)  # exact for nonnegative floats
    # frac * 2^64 is exact; values below 2^-11 lose bits beyond 2^-64 only
    hi = np.floor(frac * 2.0**32)
    lo = (frac * 2.0**32 - hi) * 2.0**32
    m = hi.astype(np.uint64) * np.uint64(2**32) + np.floor(lo).astype(np.uint64)
    # a negative angle is the two's complement of its absolute value
    return np.where(th < 0, np.uint64(0) - m, m)


def _fixed_to_float(m: np.ndarray) -> np.ndarray:
    return m.astype(np.float64) * 2.0**-64


def _factor_from_phases(ph: np.ndarray, size: int) -> np.ndarray:
    # ph[..., b] holds the exactly reduced phase of digit b
    ang = two_pi_times(ph)
    return np.hypot(np.cos(ang).sum(-1), np.sin(ang).sum(-1)) / size


def _refine(B, vals: np.ndarray, num, den: int) -> np.ndarray:
    """Recompute factors below ``REFINE_BELOW`` at phase ``num / den`` exactly."""
    small = np.flatnonzero(vals < REFINE_BELOW)
    if not small.size:
        return vals
    allowed = as_excluded(B).allowed
    keys, inv = np.unique(np.asarray(num).ravel()[small], return_inverse=True)
    fixed = np.empty(keys.size)
    with mpmath.workdps(REFINE_DPS):
        for i, v in enumerate(keys.tolist()):
            t = mpmath.mpf(int(v)) / den
            s = mpmath.fsum(mpmath.expj(2 * mpmath.pi * b * t) for b in allowed)
            fixed[i] = float(abs(s) / len(allowed))
    vals.flat[small] = fixed[inv]
    return vals


def product_fixed(k: int, B, m: np.ndarray) -> np.ndarray:
    """``F_{10^k}`` at fixed-point phases ``m`` via the digit product."""
    allowed = np.array(as_excluded(B).allowed, dtype=np.uint64)
    out = np.ones(m.shape)
    ten = np.uint64(10)
    m = m.copy()
    for _ in range(k):
        # b * m wraps mod 2^64, so every digit phase is reduced exactly
        ph = (m[..., None] * allowed).astype(np.float64) * 2.0**-64
        f = _factor_from_phases(ph, allowed.size)
        out *= _refine(B, f, m, TWO64)
        m *= ten
    return out


def product_rational(k: int, B, num, den: int) -> np.ndarray:
    """``F_{10^k}(num / den)`` with exact integer phase stepping."""
    den = int(den)
    if den * 10 >= 2**63:
        raise ValueError("denominator too large for int64 phase stepping")
    allowed = np.array(as_excluded(B).allowed, dtype=np.int64)
    r = np.mod(np.asarray(num, dtype=np.int64), den)
    out = np.ones(r.shape)
    for _ in range(k):
        ph = ((r[..., None] * allowed) % den) / den
        f = _factor_from_phases(ph, allowed.size)
        out *= _refine(B, f, r, den)
        r = (r * 10) % den
    return out


def eval_direct(k: int, B, theta, conv: DigitConvention = PADDED) -> NormalizedSum:
    """Sum ``e(n theta)`` over every member below ``10^k`` (oracle path)."""
    val = eval_direct_many(k, B, [theta], conv)[0]
    return NormalizedSum(float(val), k, float(theta))


def eval_direct_many(k: int, B, thetas, conv: DigitConvention = PADDED) -> np.ndarray:
    """Direct summation at many ``theta``.

    Angles are formed with a single rounding and accumulated with
    compensation, so the absolute error is a few ulps per term; the error
    relative to ``F`` still grows where ``F`` itself is tiny.
    """
    B = as_excluded(B)
    if not 1 <= k <= MAX_DIRECT_K:
        raise ValueError(f"k must lie in 1..{MAX_DIRECT_K}")
    n = member_array(10**k - 1, B, conv, k=k if conv is PADDED else None).astype(np.uint64)
    m = np.concatenate([to_fixed(t) for t in thetas]) if any(isinstance(t, Fraction) for t in thetas) \
        else to_fixed(np.asarray(thetas, dtype=np.float64))
    re, im = direct_sums(n, m)
    return np.hypot(re, im) / (10 - B.size) ** k


def eval_product(k: int, B, theta, conv: DigitConvention = PADDED) -> NormalizedSum:
    """``F_{10^k}(theta)`` as a product of ``k`` single-digit factors."""
    B = as_excluded(B)
    if k < 1:
        raise ValueError("k must be at least 1")
    if conv is GENUINE and 0 in B.digits:
        raise ValueError("the digit product formula needs the padded convention when 0 is excluded")
    if isinstance(theta, Fraction):
        val = product_rational(k, B, [theta.numerator], theta.denominator)[0]
    else:
        val = product_fixed(k, B, to_fixed(theta))[0]
    return NormalizedSum(float(val), k, float(theta))


def eval_product_many(k: int, B, thetas) -> np.ndarray:
    return product_fixed(k, B, to_fixed(np.asarray(thetas, dtype=np.float64)))


def sum_at_fractions(k: int, B, t: float = 1.0) -> float:
    """``sum_{0 <= a < 10^k} F_{10^k}(a / 10^k)^t``."""
    a = np.arange(10**k, dtype=np.int64)
    vals = product_rational(k, B, a, 10**k)
    return math.fsum(vals**t)


def _product_lipschitz(k: int, B) -> float:
    return lipschitz_factor(B) * (10**k - 1) / 9


def _exponent(B) -> Fraction:
    d = as_excluded(B).size
    if d not in ALPHA:
        raise ValueError(f"no large-sieve exponent for |B| = {d}; scans support 1..3 digits")
    return ALPHA[d]


def single_modulus_reference(k: int, B, q: int) -> float:
    e = float(_exponent(B))
    return q**e + q * 10.0 ** (-k * (1 - e))


def farey_reference(k: int, B, Q: int) -> float:
    e = float(_exponent(B))
    return Q ** (2 * e) + Q**2 * 10.0 ** (-k * (1 - e))


def scan_single_modulus(k: int, B, q: int, beta_points: int = 256) -> ScanReport:
    """Grid estimate of ``sup_beta sum_{a <= q} F_{10^k}(a / q + beta)``.

    ``beta`` runs over ``j / (q * grid)`` for ``0 <= j < grid``, one period of
    the sum.  ``margin`` bounds what the grid can miss between nodes.
    """
    B = as_excluded(B)
    if q < 1 or beta_points < 1:
        raise ValueError("need q >= 1 and beta_points >= 1")
    den = q * beta_points
    a = np.arange(1, q + 1, dtype=np.int64)
    j = np.arange(beta_points, dtype=np.int64)
    vals = product_rational(k, B, a[None, :] * beta_points + j[:, None], den)
    sums = np.array([math.fsum(row) for row in vals])
    jbest = int(np.argmax(sums))
    margin = q * _product_lipschitz(k, B) / (2 * den)
    return ScanReport(B.label(), k, q, beta_points, float(sums[jbest]),
                      single_modulus_reference(k, B, q), "single", margin, jbest / den)


def farey_fractions(Q: int):
    """``(a, q)`` with ``1 <= a <= q <= Q`` and ``gcd(a, q) = 1``, grouped by ``q``."""
    for q in range(1, Q + 1):
        a = np.arange(1, q + 1, dtype=np.int64)
        yield q, a[np.gcd(a, q) == 1]


def scan_farey(k: int, B, Q: int, beta_points: int = 256) -> ScanReport:
    """Grid estimate of ``sup_beta sum_{q <= Q} sum_{(a,q)=1} F(a / q + beta)``."""
    B = as_excluded(B)
    if Q < 1 or beta_points < 1:
        raise ValueError("need Q >= 1 and beta_points >= 1")
    j = np.arange(beta_points, dtype=np.int64)
    parts = []
    count = 0
    for q, a in farey_fractions(Q):
        den = q * beta_points
        num = a[None, :] * beta_points + j[:, None] * q
        parts.append(product_rational(k, B, num, den))
        count += a.size
    vals = np.hstack(parts)
    sums = np.array([math.fsum(row) for row in vals])
    jbest = int(np.argmax(sums))
    margin = count * _product_lipschitz(k, B) / (2 * beta_points)
    return ScanReport(B.label(), k, Q, beta_points, float(sums[jbest]),
                      farey_reference(k, B, Q), "farey", margin, jbest / beta_points)


@dataclass
class DecayReport:
    B: str
    q: int
    a: int
    rows: list = field(default_factory=list)  # (k, F)
    c0: float = float("nan")
    intercept: float = float("nan")


def _coprime_to_ten_part(q: int) -> int:
    while q % 2 == 0:
        q //= 2
    while q % 5 == 0:
        q //= 5
    return q


def small_modulus_decay(k_values: Sequence[int], B, q: int, a: int) -> DecayReport:
    """Tabulate ``F_{10^k}(a / q)`` and fit ``-log F ~ c0 * log(10^k) / log q``."""
    B = as_excluded(B)
    if _coprime_to_ten_part(q) <= 1:
        raise ValueError(f"q = {q} has no factor > 1 coprime to 10")
    if math.gcd(a, q) != 1:
        raise ValueError(f"a = {a} is not coprime to q = {q}")
    ks = sorted(int(k) for k in k_values)
    bad = [k for k in ks if q**3 >= 10**k]
    if bad:
        raise ValueError(f"q = {q} is not below 10^(k/3) for k in {bad}")
    rows = [(k, float(product_rational(k, B, [a], q)[0])) for k in ks]
    report = DecayReport(B.label(), q, a, rows)
    if len(rows) >= 2:
        xs = np.array([k * math.log(10) / math.log(q) for k, _ in rows])
        ys = np.array([-math.log(v) for _, v in rows])
        slope, intercept = np.polyfit(xs, ys, 1)
        report.c0, report.intercept = float(slope), float(intercept)
    return report


@dataclass
class L1Report:
    B: str
    k: int
    grid: int
    estimate: float
    alpha: Optional[float]
    ratio: Optional[float]


def l1_norm(k: int, B, grid: int) -> L1Report:
    """Periodic trapezoid estimate of ``int_0^1 F_{10^k}(t) dt`` on ``grid`` cells."""
    B = as_excluded(B)
    if grid < 10**k:
        raise ValueError("grid must have at least one node per unit frequency (grid >= 10^k)")
    vals = product_rational(k, B, np.arange(grid, dtype=np.int64), grid)
    est = math.fsum(vals) / grid
    alpha = float(ALPHA[B.size]) if B.size in ALPHA else None
    ratio = est / 10.0 ** (k * (alpha - 1)) if alpha is not None else None
    return L1Report(B.label(), k, grid, est, alpha, ratio)
