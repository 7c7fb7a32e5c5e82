"""Positivity, critical strengths and small-gamma expansions of metric families."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchCrossing, NoSignChange, NonPositiveMetric
from .families import family_matrix
from .numerics import hermitian_eigen

DEFAULT_FIT_GRID = np.linspace(0.002, 0.04, 12)


@dataclass(frozen=True)
class PositivityReport:
    gamma: float
    eigenvalues: np.ndarray
    min_eigenvalue: float
    positive_definite: bool
    anisotropy: float
    threshold: float


@dataclass(frozen=True)
class CriticalGamma:
    family: str
    N: int
    gamma_critical: float
    bracket_width: float
    min_eig_at_boundary: float
    bracket: tuple = ()
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SeriesFit:
    A: np.ndarray
    B: np.ndarray
    coefficients: np.ndarray
    residual: float
    grid: np.ndarray
    family: str = ""
    N: int = 0


def positivity(candidate, tol: float = 1e-12, gamma: float | None = None) -> PositivityReport:
    """Eigenvalues of a metric candidate and its positive-definiteness verdict.

    Positive definite means ``min eigenvalue > tol * trace / N``.
    """
    theta = np.asarray(getattr(candidate, "matrix", candidate))
    if gamma is None:
        gamma = float(getattr(candidate, "gamma", np.nan))
    vals = hermitian_eigen(theta).eigenvalues.real
    N = len(vals)
    threshold = tol * float(np.trace(theta).real) / N
    lo = float(vals[0])
    return PositivityReport(gamma, vals, lo, lo > threshold, float(vals[-1] - vals[0]), threshold)


def _min_eig(family, N, gamma, options, tol):
    return positivity(family_matrix(family, N, gamma, options), tol, gamma)


def find_gamma_critical(family: str, N: int, options=None, tol: float = 1e-10,
                        gamma_lo: float = 1e-3, gamma_hi: float = 0.999,
                        scan_points: int = 256, pd_tol: float = 1e-12) -> CriticalGamma:
    """Smallest gamma in (gamma_lo, gamma_hi) where the family stops being positive definite.

    A uniform scan locates the first non-positive sample; bisection on the
    positivity verdict then shrinks the bracket below ``tol``.  The default
    upper end stays clear of the exceptional point at gamma = 1, where
    eigenvalues that vanish there sink below the round-off threshold.

    Raises
    ------
    NonPositiveMetric
        If the family is not positive definite at ``gamma_lo``.
    NoSignChange
        If positivity persists up to ``gamma_hi``.
    """
    options = dict(options or {})
    if not _min_eig(family, N, gamma_lo, options, pd_tol).positive_definite:
        raise NonPositiveMetric(f"{family} (N={N}) is not positive definite at gamma={gamma_lo}")
    grid = np.linspace(gamma_lo, gamma_hi, scan_points)
    lo = gamma_lo
    hi = None
    for g in grid[1:]:
        if _min_eig(family, N, g, options, pd_tol).positive_definite:
            lo = float(g)
        else:
            hi = float(g)
            break
    if hi is None:
        last = _min_eig(family, N, gamma_hi, options, pd_tol)
        raise NoSignChange(
            f"{family} (N={N}) stays positive definite up to gamma={gamma_hi}",
            last_gamma=gamma_hi,
            min_eigenvalue=last.min_eigenvalue,
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _min_eig(family, N, mid, options, pd_tol).positive_definite:
            lo = mid
        else:
            hi = mid
    boundary = _min_eig(family, N, hi, options, pd_tol).min_eigenvalue
    return CriticalGamma(family, N, 0.5 * (lo + hi), hi - lo, boundary, (lo, hi), options)


def branch_eigenvalues(family: str, N: int, grid, options=None) -> np.ndarray:
    """Sorted metric eigenvalues, one row per gamma in ``grid``."""
    return np.array([
        hermitian_eigen(family_matrix(family, N, float(g), options)).eigenvalues.real
        for g in grid
    ])


def fit_series(family: str, N: int, order: int = 2, grid=None, options=None,
               extra_terms: int = 4) -> SeriesFit:
    """Fit theta_j(gamma) = 1 + A_j gamma + B_j gamma^2 + ... per sorted branch.

    The least-squares basis is gamma^1 .. gamma^(order + extra_terms); the
    extra powers absorb the O(gamma^3) tail so that A and B are not biased by
    truncation.  Branches are tracked by sorted order.
    """
    grid = np.asarray(DEFAULT_FIT_GRID if grid is None else grid, dtype=float)
    vals = branch_eigenvalues(family, N, grid, options)
    degree = order + extra_terms
    if len(grid) < degree:
        raise ValueError("grid too small for the requested number of terms")
    scale = grid.max()
    V = np.vander(grid / scale, degree + 1, increasing=True)[:, 1:]
    coef, *_ = np.linalg.lstsq(V, vals - 1.0, rcond=None)
    coef = coef / (scale ** np.arange(1, degree + 1))[:, None]
    fitted = np.vander(grid, degree + 1, increasing=True)[:, 1:] @ coef + 1.0
    residual = float(np.max(np.abs(fitted - vals)))
    gaps = np.diff(vals, axis=1)
    if gaps.size and gaps.min() <= 10 * max(residual, np.finfo(float).eps):
        raise BranchCrossing(f"eigenvalue branches approach within {gaps.min():.3e}")
    A = coef[0].copy()
    B = coef[1].copy() if order >= 2 else np.zeros_like(A)
    return SeriesFit(A, B, coef[:order].copy(), residual, grid, family, N)


def leading_order_estimate(N: int) -> float:
    """First-order guess 1/(N-1) for the critical gamma of the linearized metric."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return 1.0 / (N - 1)


def equidistant_first_order(N: int) -> np.ndarray:
    """First-order slopes -(N-1), -(N-3), ..., N-1 of the linearized metric eigenvalues."""
    return 2 * np.arange(N) - (N - 1.0)


@dataclass
class EigencurveTable:
    family: str
    N: int
    gamma: np.ndarray
    eigenvalues: np.ndarray
    options: dict = field(default_factory=dict)

    @property
    def columns(self) -> list:
        return ["gamma"] + [f"theta_{k + 1}" for k in range(self.N)]

    @property
    def min_branch(self) -> np.ndarray:
        return self.eigenvalues[:, 0]

    def min_is_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.min_branch) < 0))

    def rows(self):
        for g, vals in zip(self.gamma, self.eigenvalues):
            yield [float(g)] + [float(x) for x in vals]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows():
            writer.writerow([repr(x) for x in row])
        return buf.getvalue()


def eigencurve_table(family: str, N: int, grid, options=None) -> EigencurveTable:
    """Eigenvalue curves theta_1 <= ... <= theta_N over a gamma grid, ascending in gamma."""
    grid = np.sort(np.asarray(grid, dtype=float))
    if np.any(grid < 0) or np.any(grid >= 1):
        raise ValueError("gamma grid must lie in [0, 1)")
    return EigencurveTable(family, N, grid, branch_eigenvalues(family, N, grid, options),
                           dict(options or {}))


def chebyshev_grid(n: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Chebyshev nodes on [lo, hi], ascending.

    The entries of the closed-form metrics are polynomials in gamma, so
    negative gamma is a valid sample point; the symmetric interval keeps the
    monomial fit well conditioned.
    """
    k = np.arange(n)
    return np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k + 1) * np.pi / (2 * n)))


def power_pattern(family: str, N: int, grid=None, options=None, max_power: int | None = None):
    """Polynomial coefficients of every metric entry in gamma.

    Returns ``(coef, allowed)`` where ``coef[i, j, K]`` is the coefficient of
    gamma^K in Theta_ij (real part for i+j even, imaginary part otherwise,
    1-based parity) and ``allowed[i, j, K]`` marks powers permitted by the
    rules: K has the parity of i+j and |i-j| <= K <= min(i+j-2, 2N+2-i-j).
    """
    if max_power is None:
        max_power = N + 2
    grid = chebyshev_grid(12) if grid is None else np.asarray(grid, dtype=float)
    mats = np.array([family_matrix(family, N, float(g), options) for g in grid])
    V = np.vander(grid, max_power + 1, increasing=True)
    coef = np.zeros((N, N, max_power + 1))
    allowed = np.zeros_like(coef, dtype=bool)
    K = np.arange(max_power + 1)
    for i in range(N):
        for j in range(N):
            s = (i + 1) + (j + 1)
            data = mats[:, i, j].real if s % 2 == 0 else mats[:, i, j].imag
            coef[i, j] = np.linalg.lstsq(V, data, rcond=None)[0]
            kmax = min(s - 2, 2 * N + 2 - s)
            allowed[i, j] = (K % 2 == s % 2) & (K >= abs(i - j)) & (K <= kmax)
    return coef, allowed
