"""Exact counts over the lattice ``m^2 + l^2 <= x`` with ``l`` digit-restricted.

``l`` runs over members of the digit-restricted set (genuine expansion) with
no prime factor ``<= P``; this excludes ``l = 0`` since ``gcd(0, Pi) = Pi``.
``m`` runs over all integers, both signs and zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .arith import mobius, prime_sieve, primes_up_to, proper_prime_powers, von_mangoldt_table
from .digits import GENUINE, ExcludedDigits, as_excluded, gamma_exponent, member_array
from .quadratic import constant_C, kappa_B, main_term, rho_ell_for_ells

DEFAULT_MEMORY_BUDGET = 2**30  # bytes
MAX_WALK_X = 2 * 10**9
MAX_VAUGHAN_X = 10**7


@dataclass
class SieveRun:
    x: int
    P: int
    B: ExcludedDigits
    threads: int = 1
    convention: str = GENUINE.value
    primes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.x = int(self.x)
        self.P = int(self.P)
        self.B = as_excluded(self.B)
        if self.x < 0:
            raise ValueError("x must be nonnegative")
        if self.P < 2:
            raise ValueError("P must be at least 2")
        self.primes = primes_up_to(self.P)

    @property
    def Pi(self) -> int:
        return math.prod(self.primes.tolist())

    @property
    def theorem_mode(self) -> bool:
        """Whether ``(log log x)^4 <= log P <= sqrt(log x) / log log x``."""
        if self.x < 16:
            return False
        lx = math.log(self.x)
        llx = math.log(lx)
        return llx**4 <= math.log(self.P) <= math.sqrt(lx) / llx

    def ells(self) -> np.ndarray:
        """Admissible ``l <= sqrt(x)`` in increasing order."""
        ells = member_array(math.isqrt(self.x), self.B, GENUINE)
        for p in self.primes.tolist():
            ells = ells[ells % p != 0]
        return ells

    def row_lengths(self, ells: Optional[np.ndarray] = None) -> np.ndarray:
        """``2 floor(sqrt(x - l^2)) + 1``: lattice points on each row."""
        if ells is None:
            ells = self.ells()
        r = np.array([math.isqrt(self.x - e * e) for e in ells.tolist()], dtype=np.int64)
        return 2 * r + 1

    def provenance(self) -> dict:
        return {"x": self.x, "P": self.P, "B": self.B.label(), "convention": self.convention,
                "theorem_mode": self.theorem_mode}


@dataclass
class WeightArray:
    x: int
    values: np.ndarray


def build_weights(run: SieveRun, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> WeightArray:
    """``a[n]`` = number of admissible lattice points on ``m^2 + l^2 = n``."""
    need = 4 * (run.x + 1)
    if need > memory_budget:
        raise MemoryError(f"weight array needs {need} bytes, budget is {memory_budget}")
    return WeightArray(run.x, kernels.lattice_counts(run.ells(), run.x))


def brute_force_weights(x: int, P: int, B) -> np.ndarray:
    """Double loop over ``(m, l)``; the oracle for :func:`build_weights`."""
    B = as_excluded(B)
    ps = primes_up_to(P).tolist()
    out = np.zeros(x + 1, dtype=np.int64)
    r = math.isqrt(x)
    for ell in range(0, r + 1):
        if any(str(c) in B.label() for c in str(ell)):
            continue
        if any(ell % p == 0 for p in ps):
            continue
        for m in range(-r, r + 1):
            n = m * m + ell * ell
            if n <= x:
                out[n] += 1
    return out


def lattice_count(run: SieveRun) -> int:
    """Lattice points with ``l`` anywhere in the digit set, ``l = 0`` included.

    This is the count the main term is proportional to; the coprimality to
    ``Pi`` is accounted for by the ``e^{-gamma} / log P`` factor instead.
    """
    ells = member_array(math.isqrt(run.x), run.B, GENUINE)
    return int(run.row_lengths(ells).sum())


def admissible_lattice_count(run: SieveRun) -> int:
    """Lattice points with admissible ``l``, i.e. ``sum_n a(n)``."""
    return int(run.row_lengths().sum())


@dataclass
class SResult:
    total: float
    prime_only: float

    @property
    def prime_power_part(self) -> float:
        return self.total - self.prime_only


def _chunks(a: np.ndarray, parts: int) -> list:
    return [c for c in np.array_split(a, max(1, parts)) if c.size]


def s_of_x(run: SieveRun, is_prime: Optional[np.ndarray] = None) -> SResult:
    """``S(x) = sum_n a(n) Lambda(n)`` by walking each lattice row.

    The prime-only part keeps the ``n = p`` terms.  Per-row partials are
    reduced with ``fsum`` in row order, so the result does not depend on
    the thread count.
    """
    if run.x < 2:
        return SResult(0.0, 0.0)
    if run.x > MAX_WALK_X:
        raise ValueError(f"x above {MAX_WALK_X} is out of desk range")
    if is_prime is None:
        is_prime = prime_sieve(run.x)
    pp_vals, pp_logs = proper_prime_powers(run.x)
    ells = run.ells()

    def part(chunk):
        return kernels.lattice_lambda_partials(chunk, run.x, is_prime, pp_vals, pp_logs)

    chunks = _chunks(ells, run.threads * 4 if run.threads > 1 else 1)
    if run.threads > 1:
        with ThreadPoolExecutor(max_workers=run.threads) as pool:
            parts = list(pool.map(part, chunks))
    else:
        parts = [part(c) for c in chunks]
    if not parts:
        return SResult(0.0, 0.0)
    total = np.concatenate([p[0] for p in parts])
    prime = np.concatenate([p[1] for p in parts])
    return SResult(math.fsum(total), math.fsum(prime))


# congruence sums -----------------------------------------------------------

@dataclass
class RemainderTable:
    x: int
    D: int
    A: np.ndarray  # index d - 1
    M: np.ndarray
    A_log: Optional[np.ndarray] = None
    provenance: dict = field(default_factory=dict)

    @property
    def R(self) -> np.ndarray:
        return self.A - self.M

    def total(self, D: Optional[int] = None) -> float:
        """``R(x, D) = sum_{d <= D} |R_d|``."""
        D = self.D if D is None else D
        return math.fsum(np.abs(self.R[:D]))

    CSV_FIELDS = ("d", "A_d", "M_d", "R_d")

    def rows(self):
        for d in range(1, self.D + 1):
            yield {"d": d, "A_d": repr(float(self.A[d - 1])), "M_d": repr(float(self.M[d - 1])),
                   "R_d": repr(float(self.R[d - 1]))}


def congruence_table(run: SieveRun, D: int, with_log: bool = False,
                     weights: Optional[WeightArray] = None) -> RemainderTable:
    """``A_d``, ``M_d`` and ``R_d = A_d - M_d`` for ``d <= D``."""
    if D < 1:
        raise ValueError("D must be positive")
    if D * D > max(run.x, 1):
        raise ValueError("D must not exceed sqrt(x)")
    if weights is None:
        weights = build_weights(run)
    a = weights.values
    ells = run.ells()
    rows = run.row_lengths(ells).astype(np.float64)
    A = np.array([float(a[d::d].sum(dtype=np.int64)) for d in range(1, D + 1)])

    def m_d(d):
        return math.fsum(rows * rho_ell_for_ells(ells, d)) / d

    if run.threads > 1:
        with ThreadPoolExecutor(max_workers=run.threads) as pool:
            M = np.array(list(pool.map(m_d, range(1, D + 1))))
    else:
        M = np.array([m_d(d) for d in range(1, D + 1)])
    A_log = None
    if with_log:
        logs = np.log(np.maximum(np.arange(run.x + 1, dtype=np.float64), 1.0))
        A_log = np.array([math.fsum(a[d::d] * logs[d::d]) for d in range(1, D + 1)])
    return RemainderTable(run.x, D, A, M, A_log, run.provenance())


def type_one_scale(x: int, D: int, B) -> float:
    """``D^{1/4} x^{1/2 + gamma/4}``."""
    g = gamma_exponent(as_excluded(B).size)
    return D**0.25 * x ** (0.5 + g / 4)


@dataclass
class TypeIFit:
    x: int
    D_values: tuple
    R_values: tuple
    constants: tuple
    fitted_c: float

    @property
    def spread(self) -> float:
        """Largest ratio of a per-``D`` constant to the fitted one, either way."""
        return max(max(c / self.fitted_c, self.fitted_c / c) for c in self.constants)


def type_one_fit(run: SieveRun, D_values: Sequence[int]) -> TypeIFit:
    """Normalise ``R(x, D)`` by its bound shape and fit one constant (log least squares)."""
    D_values = tuple(sorted(int(d) for d in D_values))
    table = congruence_table(run, D_values[-1])
    Rs = tuple(table.total(D) for D in D_values)
    cs = tuple(R / type_one_scale(run.x, D, run.B) for R, D in zip(Rs, D_values))
    c = math.exp(math.fsum(math.log(v) for v in cs) / len(cs))
    return TypeIFit(run.x, D_values, Rs, cs, c)


# Vaughan's identity ----------------------------------------------------------

@dataclass
class VaughanPieces:
    small: float        # Lambda_{<=U}
    mu_log: float       # mu_{<=V} * log
    triple: float       # Lambda_{<=U} * mu_{<=V} * 1, entering with a minus sign
    bilinear: float     # Lambda_{>U} * mu_{>V} * 1
    S: float

    @property
    def total(self) -> float:
        return math.fsum([self.small, self.mu_log, -self.triple, self.bilinear])

    @property
    def residual(self) -> float:
        return abs(self.total - self.S) / max(1.0, abs(self.S))


def _check_uv(x, U, V):
    if U < 2 or V < 2:
        raise ValueError("U and V must be at least 2")
    if x > MAX_VAUGHAN_X:
        raise ValueError(f"x above {MAX_VAUGHAN_X} is too large for full arrays")


def _mu_tail_one(n: int, V: int, mu: np.ndarray) -> np.ndarray:
    """``(mu_{>V} * 1)(k)`` for ``k <= n``."""
    d = np.arange(V + 1, n + 1, dtype=np.int64)
    d = d[mu[V + 1:n + 1] != 0]
    return kernels.divisor_accumulate(d, mu[d].astype(np.float64), np.ones(n + 1), n)


def vaughan_pointwise(n: int, U: int, V: int):
    """The four pieces as functions on ``1..n``, plus ``Lambda``; index 0 unused."""
    _check_uv(n, U, V)
    lam = von_mangoldt_table(n)
    mu = mobius(n).astype(np.float64)
    small = np.where(np.arange(n + 1) <= U, lam, 0.0)
    dv = np.flatnonzero(mu[1:min(V, n) + 1]) + 1
    logs = np.log(np.maximum(np.arange(n + 1, dtype=np.float64), 1.0))
    mu_log = kernels.divisor_accumulate(dv, mu[dv], logs, n)
    mu_v = np.where(np.arange(n + 1) <= V, mu, 0.0)
    mv = np.flatnonzero(lam[1:min(U, n) + 1]) + 1
    h = kernels.divisor_accumulate(mv, lam[mv], mu_v, n)
    hv = np.flatnonzero(h[1:]) + 1
    triple = kernels.divisor_accumulate(hv, h[hv], np.ones(n + 1), n)
    tail = _mu_tail_one(n, V, mu)
    bv = np.flatnonzero(lam[U + 1:]) + U + 1 if U < n else np.zeros(0, dtype=np.int64)
    bilinear = kernels.divisor_accumulate(bv, lam[bv], tail, n)
    return small, mu_log, triple, bilinear, lam


def vaughan_decompose(run: SieveRun, U: int, V: int, weights: Optional[WeightArray] = None) -> VaughanPieces:
    """``sum_n a(n) piece(n)`` for each piece of Vaughan's identity.

    Each piece is a truncated Dirichlet convolution summed against ``a``
    without forming the convolution on ``[1, x]``: for ``f * g`` the sum is
    ``sum_d f(d) sum_k g(k) a(dk)``.  ``S`` comes from the independent
    lattice walk of :func:`s_of_x`.
    """
    x = run.x
    _check_uv(x, U, V)
    if weights is None:
        weights = build_weights(run)
    a = weights.values.astype(np.float64)
    lam = von_mangoldt_table(x)
    mu = mobius(x).astype(np.float64)
    ones = np.ones(x + 1)

    small = math.fsum(a[1:U + 1] * lam[1:U + 1])

    dv = np.flatnonzero(mu[1:min(V, x) + 1]) + 1
    logs = np.log(np.maximum(np.arange(x + 1, dtype=np.float64), 1.0))
    mu_log = math.fsum(kernels.conv_dot_partials(dv, mu[dv], logs, a))

    # h = Lambda_{<=U} * mu_{<=V} lives on [1, min(UV, x)]
    top = min(U * V, x)
    mu_v = np.zeros(top + 1)
    mu_v[1:min(V, top) + 1] = mu[1:min(V, top) + 1]
    mv = np.flatnonzero(lam[1:min(U, top) + 1]) + 1
    h = kernels.divisor_accumulate(mv, lam[mv], mu_v, top)
    hv = np.flatnonzero(h[1:]) + 1
    triple = math.fsum(kernels.conv_dot_partials(hv, h[hv], ones, a))

    if U < x and V < x:
        tail = _mu_tail_one(x, V, mu)
        bv = np.flatnonzero(lam[U + 1:]) + U + 1
        bilinear = math.fsum(kernels.conv_dot_partials(bv, lam[bv], tail, a))
    else:
        bilinear = 0.0

    S = s_of_x(run).total
    return VaughanPieces(small, mu_log, triple, bilinear, S)


# end-to-end ratio ------------------------------------------------------------

@dataclass
class TheoremCheck:
    lhs: float
    lhs_primes: float
    rhs: float
    lattice_count: int
    C: float
    kappa: str
    theorem_mode: bool
    provenance: dict

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs

    def to_json(self) -> dict:
        return {"schema": 1, "lhs": self.lhs, "lhs_primes": self.lhs_primes, "rhs": self.rhs,
                "ratio": self.ratio, "lattice_count": self.lattice_count, "C": self.C,
                "kappa": self.kappa, "theorem_mode": self.theorem_mode, **self.provenance}


def verify_main_theorem(run: SieveRun, p_max: int = 10**6, is_prime: Optional[np.ndarray] = None) -> TheoremCheck:
    """``S(x)`` against the predicted main term for the same run."""
    if p_max < 10**6:
        raise ValueError("constants need a prime cutoff of at least 10^6")
    count = lattice_count(run)
    C = constant_C(p_max).value
    rhs = main_term(run.x, run.P, run.B, count, C=C)
    if rhs == 0:
        raise ValueError("empty lattice: the main term vanishes")
    s = s_of_x(run, is_prime)
    prov = dict(run.provenance(), truncation=p_max)
    return TheoremCheck(s.total, s.prime_only, rhs, count, C, str(kappa_B(run.B)), run.theorem_mode, prov)


def growth_slope(x_lo: int, x_hi: int, P: int, B) -> tuple[float, float, float]:
    """Two-point slope of ``log S`` against ``log x``; also returns both ``S``."""
    is_prime = prime_sieve(x_hi)
    s_lo = s_of_x(SieveRun(x_lo, P, B), is_prime[:x_lo + 1]).total
    s_hi = s_of_x(SieveRun(x_hi, P, B), is_prime).total
    return (math.log(s_hi) - math.log(s_lo)) / (math.log(x_hi) - math.log(x_lo)), s_lo, s_hi
