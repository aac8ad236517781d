"""Quadratic root counts and the singular constants of the main term.

``rho(d)`` counts ``nu mod d`` with ``nu^2 + 1 = 0 (mod d)`` and ``rho_ell(ell, d)``
counts ``nu^2 + ell^2 = 0 (mod d)``.  Each has a closed-form path and a
brute-force path; the brute-force path is the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import factorint, mobius, primes_up_to, square_root_part_table
from .digits import as_excluded, gamma_exponent

BRUTE_LIMIT = 2**20
EULER_GAMMA = 0.577215664901532860606512090082


def chi(n: int) -> int:
    """The nonprincipal character mod 4."""
    r = n % 4
    return 0 if r % 2 == 0 else (1 if r == 1 else -1)


def chi_array(n) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    r = n % 4
    return np.where(r == 1, 1, np.where(r == 3, -1, 0)).astype(np.int64)


# brute-force oracles ---------------------------------------------------------

def rho_ell_brute(ell: int, d: int) -> int:
    nu = np.arange(d, dtype=np.int64)
    return int(np.count_nonzero((nu * nu + (ell * ell) % d) % d == 0))


def rho_brute(d: int) -> int:
    return rho_ell_brute(1, d)


def rho_ell_brute_table(ells, n: int) -> np.ndarray:
    """``out[i, d] = rho_{ells[i]}(d)`` by counting square residues, ``d <= n``."""
    ells = np.asarray(ells, dtype=np.int64)
    out = np.zeros((ells.size, n + 1), dtype=np.int64)
    l2 = ells * ells
    for d in range(1, n + 1):
        nu = np.arange(d, dtype=np.int64)
        hist = np.bincount((nu * nu) % d, minlength=d)
        out[:, d] = hist[(-l2) % d]
    return out


# closed forms ----------------------------------------------------------------

def _roots_mod(p: int, e: int) -> np.ndarray:
    q = p**e
    nu = np.arange(q, dtype=np.int64)
    return nu[(nu * nu + 1) % q == 0]


@lru_cache(maxsize=None)
def rho_prime_power(p: int, e: int) -> int:
    """``rho(p^e)``: brute force up to ``2^20``, Hensel lifting beyond."""
    if e == 0:
        return 1
    if p**e <= BRUTE_LIMIT:
        return int(_roots_mod(p, e).size)
    if p == 2:
        j = BRUTE_LIMIT.bit_length() - 1
        roots = [int(r) for r in _roots_mod(2, j)]
        while j < e and roots:
            mod = 2 ** (j + 1)
            roots = [r + s * 2**j for r in roots for s in (0, 1) if ((r + s * 2**j) ** 2 + 1) % mod == 0]
            j += 1
        return len(roots)
    # odd p: roots are nonsingular (2 nu is a unit), so each lifts uniquely
    if p > BRUTE_LIMIT:
        return 1 + chi(p)
    e0 = int(math.log(BRUTE_LIMIT, p))
    while p ** (e0 + 1) <= BRUTE_LIMIT:
        e0 += 1
    while p**e0 > BRUTE_LIMIT:
        e0 -= 1
    return rho_prime_power(p, e0)


def rho(d: int) -> int:
    if d < 1:
        raise ValueError("d must be positive")
    out = 1
    for p, e in factorint(d):
        out *= rho_prime_power(p, e)
        if out == 0:
            break
    return out


def square_root_part(d: int) -> int:
    """Largest ``r`` with ``r^2 | d``."""
    r = 1
    for p, e in factorint(d):
        r *= p ** (e // 2)
    return r


def rho_ell(ell: int, d: int) -> int:
    """``(r(d), ell) * rho(d / (d, ell^2))``."""
    if ell < 1 or d < 1:
        raise ValueError("ell and d must be positive")
    return math.gcd(square_root_part(d), ell) * rho(d // math.gcd(d, ell * ell))


def rho_table(n: int) -> np.ndarray:
    """``rho[0..n]`` built multiplicatively.

    Odd primes take ``1 + chi(p)`` and keep that value on every power
    (nonsingular Hensel lift); powers of 2 come from :func:`rho_prime_power`.
    """
    out = np.ones(n + 1, dtype=np.int64)
    out[0] = 0
    for p in primes_up_to(n).tolist():
        prev = 1
        q, e = p, 1
        while q <= n:
            cur = rho_prime_power(2, e) if p == 2 else 1 + chi(p)
            if prev == 0:
                break
            if cur % prev:
                raise ArithmeticError(f"non-integral prime-power ratio at {p}^{e}")
            ratio = cur // prev
            if ratio != 1:
                out[q::q] *= ratio
            prev = cur
            q *= p
            e += 1
    return out


def rho_ell_table(ell: int, n: int, rho_tab=None, r_tab=None) -> np.ndarray:
    """``rho_ell[0..n]`` from the closed form, vectorised over ``d``."""
    if rho_tab is None:
        rho_tab = rho_table(n)
    if r_tab is None:
        r_tab = square_root_part_table(n)
    d = np.arange(n + 1, dtype=np.int64)
    d[0] = 1
    g = np.gcd(d, ell * ell)
    out = np.gcd(r_tab, ell) * rho_tab[d // g]
    out[0] = 0
    return out


def rho_ell_for_ells(ells, d: int) -> np.ndarray:
    """``rho_ell(ell, d)`` for an array of ``ell`` at one modulus ``d``."""
    ells = np.asarray(ells, dtype=np.int64)
    r = square_root_part(d)
    g = np.gcd(ells * ells, d)
    rho_vals = {int(v): rho(d // int(v)) for v in np.unique(g)}
    lookup = np.array([rho_vals[int(v)] for v in g], dtype=np.int64) if g.size else g
    return np.gcd(r, ells) * lookup


# averages ----------------------------------------------------------------------

@dataclass
class AverageRho:
    ell: int
    y: int
    total: float
    scale: float

    @property
    def ratio(self) -> float:
        return self.total / self.scale


def average_rho_check(ell: int, y: int) -> AverageRho:
    """``sum_{n <= y} rho_ell(n) / n`` against ``(log y)^2 prod_{p | ell}(1 + 7/sqrt p)``."""
    if y < 2:
        raise ValueError("y must be at least 2")
    vals = rho_ell_table(ell, y)
    total = math.fsum(vals[1:] / np.arange(1, y + 1))
    scale = math.log(y) ** 2 * math.prod(1 + 7 / math.sqrt(p) for p, _ in factorint(ell)) if ell > 1 \
        else math.log(y) ** 2
    return AverageRho(ell, y, total, scale)


def mobius_rho_partial_sum(ell: int, V: int) -> float:
    """``sum_{d <= V} mu(d) rho_ell(d) / d``."""
    if V < 1:
        raise ValueError("V must be positive")
    mu = mobius(V).astype(np.int64)
    vals = mu[1:] * rho_ell_table(ell, V)[1:]
    nz = np.flatnonzero(vals)
    return math.fsum(vals[nz] / (nz + 1.0))


# singular constants ------------------------------------------------------------

@dataclass
class EulerProduct:
    value: float
    truncation: int
    tail_bound: float


def constant_C(p_max: int) -> EulerProduct:
    """``prod_{p <= p_max} (1 - chi(p) / ((p - 1)(p - chi(p))))``.

    ``tail_bound`` majorises ``sum_{p > p_max} |chi(p)| / ((p-1)(p-chi(p)))``
    by ``sum_{n > p_max} 1/(n-1)^2 < 1/(p_max - 1)``.
    """
    if p_max < 3:
        raise ValueError("p_max must be at least 3")
    p = primes_up_to(p_max).astype(np.float64)
    c = chi_array(p.astype(np.int64)).astype(np.float64)
    logs = np.log1p(-c / ((p - 1) * (p - c)))
    return EulerProduct(math.exp(math.fsum(logs)), int(p_max), 1.0 / (p_max - 1))


def kappa1(a0: int) -> Fraction:
    if not 0 <= a0 <= 9:
        raise ValueError("a0 must be a digit")
    phi10 = 4
    if math.gcd(a0, 10) != 1:
        return Fraction(10, 9)
    return Fraction(10 * (phi10 - 1), 9 * phi10)


def kappa_B(B) -> Fraction:
    B = as_excluded(B)
    if not 1 <= B.size <= 3:
        raise ValueError("kappa_B is defined for 1 <= |B| <= 3")
    phi10 = 4
    shared = sum(1 for a in B.digits if math.gcd(a, 10) != 1)
    return Fraction(10, phi10) * Fraction(phi10 + shared - B.size, 10 - B.size)


@dataclass
class SingularConstants:
    C: float
    truncation: int
    tail_bound: float
    kappa: Fraction
    gamma_exponent: float
    gamma_euler: float = EULER_GAMMA

    def to_json(self) -> dict:
        out = asdict(self)
        out["kappa"] = str(self.kappa)
        out["kappa_float"] = float(self.kappa)
        out["schema"] = 1
        return out


def singular_constants(B, p_max: int = 10**6) -> SingularConstants:
    B = as_excluded(B)
    C = constant_C(p_max)
    return SingularConstants(C.value, C.truncation, C.tail_bound, kappa_B(B), gamma_exponent(B.size))


def main_term(x: float, P: int, B, lattice_count: int, C: float | None = None, p_max: int = 10**6) -> float:
    """``(4 C kappa / pi) (e^{-gamma} / log P) * lattice_count``."""
    if P < 3:
        raise ValueError("P must be at least 3")
    if C is None:
        C = constant_C(p_max).value
    kappa = float(kappa_B(B))
    return 4 * C * kappa / math.pi * math.exp(-EULER_GAMMA) / math.log(P) * lattice_count
