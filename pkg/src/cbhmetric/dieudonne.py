"""Solutions Theta of the Dieudonne equation H^H Theta = Theta H.

Three independent routes produce Hermitian solutions:

* :func:`metric_from_first_row` -- row-by-row recurrence for tridiagonal H,
  parameterized by the real parts of the first row;
* :func:`solve_nullspace` -- SVD nullspace of the vectorized commutator map
  restricted to Hermitian unknowns;
* :func:`spectral_metric` -- Theta = sum_j w_j |l_j><l_j| over the left
  eigenvectors of H.

Closed-form families live in :mod:`cbhmetric.families`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSpectrum,
    IllConditioned,
    InvalidParams,
    NonPositiveMetric,
    RecurrenceBreakdown,
)
from .numerics import (
    NullspaceBasis,
    as_square,
    general_eigen,
    hermiticity_residual,
    max_abs,
    nullspace,
)

FAMILIES = ("general", "zero_param", "chessboard", "delta_rule", "linearized", "spectral")
NEAR_EP = 0.99

_ALIASES = {
    4: {"beta": 1, "delta": 2, "kappa": 3},
    5: {"X": 1, "Y": 2, "Z": 3, "W": 4},
}


@dataclass(frozen=True)
class MetricParams:
    """Real parts of the first metric row, with ``first_row_real[0] == 1``.

    Named aliases: ``beta`` is entry 2 and ``delta`` entry 3 for any N,
    ``kappa`` entry 4 at N = 4, and ``X, Y, Z, W`` entries 2..5 at N = 5.
    """

    first_row_real: tuple

    def __post_init__(self):
        row = tuple(float(x) for x in self.first_row_real)
        if len(row) < 1 or row[0] != 1.0:
            raise InvalidParams("first_row_real must start with 1 (Theta_11 = 1)")
        object.__setattr__(self, "first_row_real", row)

    @property
    def N(self) -> int:
        return len(self.first_row_real)

    @classmethod
    def zero(cls, N: int) -> "MetricParams":
        return cls((1.0,) + (0.0,) * (N - 1))

    @classmethod
    def from_aliases(cls, N: int, **kw) -> "MetricParams":
        row = [1.0] + [0.0] * (N - 1)
        names = dict(_ALIASES.get(N, {}))
        names.setdefault("beta", 1)
        names.setdefault("delta", 2)
        for key, value in kw.items():
            if key not in names or names[key] >= N:
                raise InvalidParams(f"unknown parameter {key!r} for N={N}")
            row[names[key]] = float(value)
        return cls(tuple(row))

    def __getattr__(self, name):
        aliases = _ALIASES.get(len(self.first_row_real), {})
        idx = aliases.get(name, {"beta": 1, "delta": 2}.get(name))
        if idx is None or idx >= len(self.first_row_real):
            raise AttributeError(name)
        return self.first_row_real[idx]

    def as_array(self) -> np.ndarray:
        return np.array(self.first_row_real)


@dataclass
class MetricCandidate:
    matrix: np.ndarray
    params: MetricParams | None
    family: str
    gamma: float
    hermiticity_residual: float
    dieudonne_residual: float
    options: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    def second_diagonal_residual(self) -> float:
        T = self.matrix
        return max_abs(T - T[::-1, ::-1].T)


def dieudonne_residual(H, theta) -> float:
    """max |H^H Theta - Theta H|."""
    H = np.asarray(H)
    theta = np.asarray(theta)
    return max_abs(H.conj().T @ theta - theta @ H)


def infer_gamma(H) -> float:
    """Read gamma off a complexified Bose-Hubbard matrix (top-left entry is -(N-1) i gamma)."""
    H = np.asarray(H)
    N = H.shape[0]
    return float(-H[0, 0].imag / (N - 1)) if N > 1 else 0.0


def _warn_near_ep(gamma: float, v: float = 1.0):
    if v != 0 and abs(gamma / v) >= NEAR_EP:
        warnings.warn(
            f"|gamma| = {abs(gamma):.4g} is close to the exceptional point; "
            "metric solutions are ill-conditioned",
            IllConditioned,
            stacklevel=3,
        )


def _infer_v(H) -> float:
    H = np.asarray(H)
    N = H.shape[0]
    return float(abs(H[1, 0]) / math.sqrt(N - 1)) if N > 1 else 1.0


def make_candidate(H, theta, family, params=None, gamma=None, options=None) -> MetricCandidate:
    theta = np.asarray(theta, dtype=complex)
    return MetricCandidate(
        matrix=theta,
        params=params,
        family=family,
        gamma=infer_gamma(H) if gamma is None else float(gamma),
        hermiticity_residual=hermiticity_residual(theta),
        dieudonne_residual=dieudonne_residual(H, theta),
        options=dict(options or {}),
    )


# --------------------------------------------------------------------------
# recurrence


def _tridiagonal_parts(H):
    H = as_square(H)
    band = np.triu(np.tril(H, 1), -1)
    if max_abs(H - band) > 0:
        raise InvalidParams("recurrence requires a tridiagonal matrix")
    return np.diag(H).copy(), np.diag(H, 1).copy(), np.diag(H, -1).copy()


def sweep_rows(H, first_row) -> np.ndarray:
    """Fill Theta row by row from its (complex) first row.

    Entry (i, j) of H^H Theta = Theta H, solved for Theta[i+1, j]:

        conj(l_i) T[i+1,j] = u_{j-1} T[i,j-1] + d_j T[i,j] + l_j T[i,j+1]
                             - conj(u_{i-1}) T[i-1,j] - conj(d_i) T[i,j]

    with d, u, l the diagonal, super- and sub-diagonal of H.  The pivot
    ``l_i`` must not vanish.  Rows 2..N follow; the equations of the last row
    are not used here and hold automatically when H has a simple spectrum.
    """
    d, u, l = _tridiagonal_parts(H)
    N = len(d)
    pivot_floor = 1e-14 * max(1.0, max_abs(H))
    T = np.zeros((N, N), dtype=complex)
    T[0] = first_row
    for i in range(N - 1):
        if abs(l[i]) <= pivot_floor:
            raise RecurrenceBreakdown(f"vanishing sub-diagonal pivot at row {i + 1}")
        row = T[i]
        acc = d * row - np.conj(d[i]) * row
        acc[1:] += u * row[:-1]
        acc[:-1] += l * row[1:]
        if i > 0:
            acc -= np.conj(u[i - 1]) * T[i - 1]
        T[i + 1] = acc / np.conj(l[i])
    return T


def _antihermitian_vector(M) -> np.ndarray:
    K = M - M.conj().T
    return np.concatenate([K.real.ravel(), K.imag.ravel()])


def first_row_solution(H, first_row_real, tol: float = 1e-8) -> np.ndarray:
    """Hermitian Dieudonne solution with prescribed real parts of row 1.

    The sweep is complex-linear in the first row, so the imaginary parts
    ``b`` enter the anti-Hermitian part of Theta linearly; they are fixed by a
    real least-squares solve of size (2 N^2) x N.  No normalization is
    imposed on ``first_row_real``.
    """
    a = np.asarray(first_row_real, dtype=float)
    H = as_square(H)
    N = H.shape[0]
    if a.shape != (N,):
        raise InvalidParams(f"need {N} first-row entries, got {a.shape}")
    base = sweep_rows(H, a.astype(complex))
    cols = []
    for k in range(N):
        e = np.zeros(N, dtype=complex)
        e[k] = 1j
        cols.append(_antihermitian_vector(sweep_rows(H, e)))
    A = np.array(cols).T
    rhs = -_antihermitian_vector(base)
    b, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    theta = base + sweep_rows(H, 1j * b)
    scale = max(1.0, max_abs(theta))
    if hermiticity_residual(theta) > tol * scale:
        raise RecurrenceBreakdown(
            "no Hermitian solution matches the prescribed first row "
            f"(residual {hermiticity_residual(theta):.3e})"
        )
    return 0.5 * (theta + theta.conj().T)


def metric_from_first_row(H, params, gamma: float | None = None) -> MetricCandidate:
    """Unique Hermitian metric candidate whose first-row real parts are ``params``.

    ``params`` is a :class:`MetricParams` (``Theta_11 = 1``) or a plain real
    vector of length N (no normalization enforced).
    """
    if isinstance(params, MetricParams):
        row = params.as_array()
        p = params
    else:
        row = np.asarray(params, dtype=float)
        p = MetricParams(tuple(row)) if len(row) and row[0] == 1.0 else None
    g = infer_gamma(H) if gamma is None else gamma
    _warn_near_ep(g, _infer_v(H))
    theta = first_row_solution(H, row)
    return make_candidate(H, theta, "general", p, g)


# --------------------------------------------------------------------------
# nullspace route


def hermitian_basis(N: int) -> list:
    """Real basis of the N^2-dimensional space of Hermitian N x N matrices."""
    out = []
    for i in range(N):
        E = np.zeros((N, N), dtype=complex)
        E[i, i] = 1.0
        out.append(E)
    for i in range(N):
        for j in range(i + 1, N):
            E = np.zeros((N, N), dtype=complex)
            E[i, j] = E[j, i] = 1.0
            out.append(E)
            E = np.zeros((N, N), dtype=complex)
            E[i, j] = 1j
            E[j, i] = -1j
            out.append(E)
    return out


def dieudonne_operator(H) -> np.ndarray:
    """Real (2 N^2) x N^2 matrix of Theta -> H^H Theta - Theta H on Hermitian Theta."""
    H = as_square(H)
    Hd = H.conj().T
    cols = []
    for E in hermitian_basis(H.shape[0]):
        R = Hd @ E - E @ H
        cols.append(np.concatenate([R.real.ravel(), R.imag.ravel()]))
    return np.array(cols).T


def dieudonne_nullspace(H, tol: float = 1e-10, safety: float = 1e3) -> NullspaceBasis:
    ns = nullspace(dieudonne_operator(H), tol=tol, safety=safety)
    basis = hermitian_basis(np.asarray(H).shape[0])
    mats = []
    for vec in ns.basis:
        M = sum(c.real * E for c, E in zip(vec, basis))
        mats.append(0.5 * (M + M.conj().T))
    return NullspaceBasis(ns.dimension, mats, ns.gap, ns.singular_values)


def solve_nullspace(H, tol: float = 1e-10, safety: float = 1e3,
                    gamma: float | None = None) -> list:
    """Basis of all Hermitian solutions as :class:`MetricCandidate` objects.

    The basis is Frobenius-orthonormal, so ``Theta_11`` is not normalized;
    use :func:`project_onto_first_row` to pick a specific member.

    Raises
    ------
    AmbiguousRank
        When the singular-value gap collapses (near exceptional points).
    """
    g = infer_gamma(H) if gamma is None else gamma
    _warn_near_ep(g, _infer_v(H))
    ns = dieudonne_nullspace(H, tol=tol, safety=safety)
    return [make_candidate(H, M, "general", None, g, {"nullspace_gap": ns.gap})
            for M in ns.basis]


def project_onto_first_row(basis, first_row_real) -> np.ndarray:
    """Member of span(basis) whose first-row real parts equal ``first_row_real``."""
    mats = [np.asarray(getattr(b, "matrix", b)) for b in basis]
    A = np.array([[m[0, k].real for m in mats] for k in range(mats[0].shape[0])])
    coef = np.linalg.lstsq(A, np.asarray(first_row_real, dtype=float), rcond=None)[0]
    return sum(c * m for c, m in zip(coef, mats))


def span_residual(basis_a, basis_b) -> float:
    """Largest distance of a unit element of one span from the other span (both ways)."""

    def flat(ms):
        ms = [np.asarray(getattr(m, "matrix", m)) for m in ms]
        X = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in ms]).T
        q, _ = np.linalg.qr(X)
        return q

    qa = flat(basis_a)
    qb = flat(basis_b)
    r1 = np.linalg.norm(qa - qb @ (qb.T @ qa), axis=0).max()
    r2 = np.linalg.norm(qb - qa @ (qa.T @ qb), axis=0).max()
    return float(max(r1, r2))


# --------------------------------------------------------------------------
# spectral route


def left_eigenvectors(H, tol: float = 1e-9):
    """Eigenvalues and unit-norm left eigenvectors (rows) of a real-spectrum H."""
    res = general_eigen(H)
    E = res.eigenvalues
    if np.max(np.abs(E.imag)) > tol * max(1.0, max_abs(H)):
        raise DegenerateSpectrum("spectrum is not real; no positive metric exists")
    if len(E) > 1 and np.min(np.diff(np.sort(E.real))) <= tol * max(1.0, max_abs(H)):
        raise DegenerateSpectrum("spectrum is degenerate")
    W = np.linalg.inv(res.eigenvectors)
    W = W / np.linalg.norm(W, axis=1, keepdims=True)
    return E.real, W


def spectral_metric(H, weights, normalize: str | None = "trace",
                    require_positive: bool = True, gamma: float | None = None) -> MetricCandidate:
    """Theta = sum_j w_j l_j^H l_j over unit left eigenvectors l_j of H.

    Parameters
    ----------
    weights : array_like
        One weight per eigenvalue, in ascending eigenvalue order.
    normalize : {"trace", "first", None}
        ``"trace"`` rescales to trace N, ``"first"`` to Theta_11 = 1.
    """
    w = np.asarray(weights, dtype=float)
    if require_positive and np.any(w <= 0):
        raise NonPositiveMetric("spectral weights must be positive")
    _, L = left_eigenvectors(H)
    if w.shape != (L.shape[0],):
        raise InvalidParams("one weight per eigenvalue required")
    theta = (L.conj().T * w) @ L
    theta = 0.5 * (theta + theta.conj().T)
    if normalize == "trace":
        theta = theta * (theta.shape[0] / np.trace(theta).real)
    elif normalize == "first":
        theta = theta / theta[0, 0].real
    elif normalize is not None:
        raise InvalidParams(f"unknown normalization {normalize!r}")
    row = theta[0].real / theta[0, 0].real
    params = MetricParams(tuple(np.concatenate([[1.0], row[1:]])))
    return make_candidate(H, theta, "spectral", params, gamma,
                          {"weights": w.tolist(), "normalize": normalize})


def fit_spectral_weights(H, first_row_real) -> np.ndarray:
    """Weights for which the spectral metric has the given first-row real parts."""
    _, L = left_eigenvectors(H)
    M = np.array([(np.conj(l[0]) * l).real for l in L]).T
    return np.linalg.solve(M, np.asarray(first_row_real, dtype=float))


def linearized_metric(N: int, gamma: float) -> MetricCandidate:
    """First-order metric I - 2 gamma Ly; its Dieudonne residual is O(gamma^2)."""
    from .hamiltonian import cbh
    from .su2 import build_generators

    g = build_generators(N)
    theta = np.eye(N, dtype=complex) - 2 * gamma * g.Ly
    return make_candidate(cbh(N, gamma), theta, "linearized", MetricParams.zero(N), gamma)
