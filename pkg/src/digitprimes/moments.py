"""Transfer matrices bounding moments of ``F_{10^k}`` and their Perron roots.

A window ``(t_0, ..., t_J)`` of consecutive digits pins the phase
``beta = sum_j t_j 10^{-j-1} + gamma`` up to ``|gamma| <= 10^{-J-1}``.  The
entry for that window is the sup of the single-digit factor over the
window, raised to the power ``t``.  Consecutive windows overlap in ``J``
digits, which gives a 10-regular de Bruijn structure on ``10^J`` states.

The sup is taken as a grid max plus a Lipschitz margin, so every stored
entry bounds the true entry from above and the Collatz-Wielandt upper
quotient bounds the true Perron root from above.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .digits import ExcludedDigits, as_excluded
from .fourier import ALPHA, lipschitz_factor, sum_at_fractions

DEFAULT_GRID = 201
SUPPORTED_J = (1, 2, 3)
# relative slack covering float rounding in the matvec and quotients
ROUNDING_SLACK = 1e-13

WINDOWS = ("symmetric", "tail")


def threshold_for(d: int) -> float:
    """``10^alpha_d``: the bound the Perron root must stay under."""
    if d not in ALPHA:
        raise ValueError(f"no threshold for |B| = {d}")
    return 10.0 ** float(ALPHA[d])


@dataclass(frozen=True)
class GFactor:
    digit_window: tuple
    value: float
    gamma_halfwidth: float
    grid_points: int
    lipschitz_margin: float
    raw_max: float


def _gamma_grid(J: int, grid_points: int, window: str) -> tuple[np.ndarray, float]:
    if grid_points < 101:
        raise ValueError("grid_points must be at least 101")
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}")
    h = 10.0 ** (-J - 1)
    lo = -h if window == "symmetric" else 0.0
    gam = np.linspace(lo, h, grid_points)
    return gam, (h - lo) / (grid_points - 1)


def _window_digits(J: int) -> np.ndarray:
    """All windows as rows ``(t_0, ..., t_J)``, ``t_0`` most significant."""
    w = np.arange(10 ** (J + 1), dtype=np.int64)
    return np.stack([(w // 10 ** (J - j)) % 10 for j in range(J + 1)], axis=1)


def _raw_max(allowed: np.ndarray, centres: np.ndarray, gam: np.ndarray, chunk: int = 512) -> np.ndarray:
    out = np.empty(centres.size)
    for s in range(0, centres.size, chunk):
        beta = centres[s:s + chunk, None] + gam[None, :]
        ang = 2 * np.pi * beta[..., None] * allowed
        mag = np.hypot(np.cos(ang).sum(-1), np.sin(ang).sum(-1))
        out[s:s + chunk] = mag.max(axis=1) / allowed.size
    return out


def g_table(B, J: int = 2, grid_points: int = DEFAULT_GRID, window: str = "symmetric"):
    """``(windows, values, raw, margin)`` for all ``10^{J+1}`` digit windows."""
    B = as_excluded(B)
    digs = _window_digits(J)
    centres = (digs * 10.0 ** -(np.arange(J + 1) + 1.0)).sum(axis=1)
    gam, step = _gamma_grid(J, grid_points, window)
    allowed = np.array(B.allowed, dtype=np.float64)
    raw = _raw_max(allowed, centres, gam)
    margin = lipschitz_factor(B) * step / 2
    return digs, np.minimum(raw + margin, 1.0), raw, margin


def g_factor(B, window_digits: Sequence[int], grid_points: int = DEFAULT_GRID,
             window: str = "symmetric") -> GFactor:
    """Upper bound for the sup of the digit factor over one window."""
    B = as_excluded(B)
    t = tuple(int(v) for v in window_digits)
    if not t or any(v < 0 or v > 9 for v in t):
        raise ValueError("window entries must be digits 0..9")
    J = len(t) - 1
    gam, step = _gamma_grid(J, grid_points, window)
    centre = sum(v * 10.0 ** (-j - 1) for j, v in enumerate(t))
    allowed = np.array(B.allowed, dtype=np.float64)
    raw = float(_raw_max(allowed, np.array([centre]), gam)[0])
    margin = float(lipschitz_factor(B) * step / 2)
    return GFactor(t, min(raw + margin, 1.0), 10.0 ** (-J - 1), grid_points, margin, raw)


@dataclass
class TransferMatrix:
    J: int
    t: float
    B: ExcludedDigits
    entries: sp.csr_matrix
    grid_points: int = DEFAULT_GRID
    window: str = "symmetric"

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]


def build_transfer_matrix(B, t: float = 1.0, J: int = 2, grid_points: int = DEFAULT_GRID,
                          window: str = "symmetric") -> TransferMatrix:
    """``M[i, j] = G(a_1 .. a_{J+1})^t`` with ``i = sum a_{l+1} 10^{l-1}``, ``j = sum a_l 10^{l-1}``."""
    B = as_excluded(B)
    if J not in SUPPORTED_J:
        raise ValueError(f"J must be one of {SUPPORTED_J}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    digs, vals, _, _ = g_table(B, J, grid_points, window)
    powers = 10 ** np.arange(J, dtype=np.int64)
    rows = digs[:, 1:] @ powers
    cols = digs[:, :-1] @ powers
    data = np.ones_like(vals) if t == 0 else vals**t
    n = 10**J
    M = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    return TransferMatrix(J, float(t), B, M, grid_points, window)


@dataclass
class EigenCertificate:
    lambda_lower: float
    lambda_upper: float
    iterations: int
    B: str = ""
    d: int = 0
    J: int = 0
    t: float = 1.0
    grid: int = 0
    threshold: Optional[float] = None

    @property
    def margin(self) -> Optional[float]:
        return None if self.threshold is None else self.threshold - self.lambda_upper

    @property
    def verdict(self) -> Optional[str]:
        if self.threshold is None:
            return None
        return "pass" if self.lambda_upper < self.threshold else "fail"

    CSV_FIELDS = ("B", "d", "J", "t", "grid", "lambda_lower", "lambda_upper", "threshold", "margin", "verdict")

    def csv_row(self) -> dict:
        return {"B": self.B, "d": self.d, "J": self.J, "t": repr(self.t), "grid": self.grid,
                "lambda_lower": repr(self.lambda_lower), "lambda_upper": repr(self.lambda_upper),
                "threshold": repr(self.threshold), "margin": repr(self.margin), "verdict": self.verdict}


def _restrict_support(A: sp.csr_matrix) -> sp.csr_matrix:
    # drop states with no outgoing or no incoming mass until stable
    while A.shape[0]:
        rs = np.asarray(A.sum(axis=1)).ravel()
        cs = np.asarray(A.sum(axis=0)).ravel()
        ok = (rs > 0) & (cs > 0)
        if ok.all():
            break
        A = A[ok][:, ok].tocsr()
    return A


def dominant_eigenvalue(M, tol: float = 1e-10, max_iter: int = 100_000) -> EigenCertificate:
    """Collatz-Wielandt bracket of the Perron root by power iteration from ones."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = M.entries if isinstance(M, TransferMatrix) else M
    A = sp.csr_matrix(A, dtype=np.float64)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if A.nnz and A.data.min() < 0:
        raise ValueError("matrix must be nonnegative")
    A = _restrict_support(A)
    if A.shape[0] == 0:
        return EigenCertificate(0.0, 0.0, 0)
    v = np.ones(A.shape[0])
    lo, hi = 0.0, math.inf
    for it in range(1, max_iter + 1):
        w = A @ v
        q = w / v
        lo, hi = float(q.min()), float(q.max())
        if lo > 0 and (hi - lo) / lo < tol:
            break
        if lo == 0 and hi == 0:
            break
        v = w / w.max()
        if v.min() <= 0:
            raise ArithmeticError("iterate lost strict positivity; matrix is reducible on its support")
    else:
        raise ArithmeticError(f"power iteration did not converge in {max_iter} steps (bracket [{lo}, {hi}])")
    return EigenCertificate(lo * (1 - ROUNDING_SLACK), hi * (1 + ROUNDING_SLACK), it)


def certify(B, J: int = 2, t: float = 1.0, threshold: Optional[float] = None,
            grid_points: int = DEFAULT_GRID, window: str = "symmetric", tol: float = 1e-10) -> EigenCertificate:
    B = as_excluded(B)
    if threshold is None:
        threshold = threshold_for(B.size)
    cert = dominant_eigenvalue(build_transfer_matrix(B, t, J, grid_points, window), tol)
    cert.B, cert.d, cert.J, cert.t, cert.grid, cert.threshold = B.label(), B.size, J, float(t), grid_points, threshold
    return cert


def certify_all(d: int, J: int = 2, t: float = 1.0, threshold: Optional[float] = None,
                grid_points: int = DEFAULT_GRID, window: str = "symmetric", threads: int = 1,
                tol: float = 1e-10) -> list[EigenCertificate]:
    """One certificate per ``d``-subset of the digits, in lexicographic order."""
    if d not in (1, 2, 3):
        raise ValueError("d must be 1, 2 or 3")
    if threshold is None:
        threshold = threshold_for(d)
    subsets = list(itertools.combinations(range(10), d))

    def one(s):
        return certify(s, J, t, threshold, grid_points, window, tol)

    if threads <= 1:
        return [one(s) for s in subsets]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, subsets))


def moment_sum_oracle(k: int, B, t: float = 1.0) -> float:
    """``sum_{0 <= a < 10^k} F_{10^k}(a / 10^k)^t``."""
    if not 1 <= k <= 6:
        raise ValueError("k must lie in 1..6")
    return sum_at_fractions(k, as_excluded(B), t)


@dataclass
class LadderRow:
    k: int
    moment: float
    ratio: float


def moment_ladder(B, k_max: int = 6, J: int = 2, t: float = 1.0) -> tuple[float, list[LadderRow]]:
    """Perron root and the ratios ``moment_k / lambda^k`` for ``k = 1..k_max``."""
    lam = dominant_eigenvalue(build_transfer_matrix(B, t, J)).lambda_upper
    rows = []
    for k in range(1, k_max + 1):
        m = moment_sum_oracle(k, B, t)
        rows.append(LadderRow(k, m, m / lam**k))
    return lam, rows


def exponent_from_root(lam: float) -> float:
    """``log10 lambda``; compare with the large-sieve exponent."""
    return math.log10(lam)


def alpha(d: int) -> Fraction:
    return ALPHA[d]
