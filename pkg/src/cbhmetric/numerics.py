"""Dense complex linear-algebra kernels.

Matrices are plain ``numpy`` complex arrays.  The Hermitian eigensolver is a
cyclic complex Jacobi iteration; the general eigensolver and the SVD behind
:func:`nullspace` are LAPACK calls through ``numpy.linalg``.  Sizes handled
here are small (N <= 12 or so), so none of this is tuned for speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousRank, NoConvergence, NonHermitianInput

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residual: float

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class NullspaceBasis:
    """Right null vectors of a matrix.

    ``basis`` holds the null vectors (as 1-D arrays for :func:`nullspace`,
    as Hermitian matrices when produced by the Dieudonne solver).  ``gap`` is
    the ratio between the smallest rejected and the largest kept singular
    value; ``inf`` when either side is empty or exactly zero.
    """

    dimension: int
    basis: list = field(default_factory=list)
    gap: float = math.inf
    singular_values: np.ndarray | None = None


def as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def max_abs(A) -> float:
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def hermiticity_residual(A) -> float:
    A = np.asarray(A)
    return max_abs(A - A.conj().T)


def matrices_close(A, B, atol: float) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    A = np.asarray(A)
    B = np.asarray(B)
    return A.shape == B.shape and max_abs(A - B) <= atol


def sort_order(values, tie_tol: float | None = None) -> np.ndarray:
    """Permutation sorting ``values`` by real part, ties broken by imaginary part.

    Real parts closer than ``tie_tol`` count as equal, so round-off in the
    real part of a complex-conjugate pair does not decide the order.
    """
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return np.zeros(0, dtype=int)
    if tie_tol is None:
        tie_tol = 1e-9 * max(1.0, float(np.max(np.abs(values))))
    order = list(np.argsort(values.real, kind="stable"))
    out = []
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and values.real[order[stop]] - values.real[order[start]] <= tie_tol:
            stop += 1
        group = order[start:stop]
        group.sort(key=lambda k: (values.imag[k], k))
        out.extend(group)
        start = stop
    return np.array(out, dtype=int)


def _eigen_residual(A, values, vectors) -> float:
    if vectors is None or len(values) == 0:
        return 0.0
    R = A @ vectors - vectors * values[np.newaxis, :]
    return float(np.max(np.linalg.norm(R, axis=0)))


def hermitian_eigen(A, tol: float = DEFAULT_TOL, max_sweeps: int = 60) -> EigenResult:
    """Eigen-decomposition of a complex Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    A : (N, N) array_like
        Hermitian matrix; ``max|A - A^H| <= tol`` is required.
    tol : float
        Hermiticity threshold and residual bound.  The residual bound is
        scaled by ``max(1, max|A|)`` so it stays meaningful for large entries.
    max_sweeps : int
        Number of full cyclic sweeps before giving up.

    Returns
    -------
    EigenResult
        Real eigenvalues in ascending order (imaginary parts exactly zero)
        and orthonormal eigenvectors as columns.

    Raises
    ------
    NonHermitianInput
        If ``A`` is not Hermitian within ``tol``.
    NoConvergence
        If the off-diagonal mass does not vanish within ``max_sweeps``.
    """
    A = as_square(A)
    n = A.shape[0]
    scale = max(1.0, max_abs(A))
    if hermiticity_residual(A) > tol * scale:
        raise NonHermitianInput(
            f"matrix is not Hermitian: max|A - A^H| = {hermiticity_residual(A):.3e}"
        )
    a = 0.5 * (A + A.conj().T)
    v = np.eye(n, dtype=complex)
    total = np.linalg.norm(a)
    target = 1e-16 * max(total, 1e-300)

    sweeps = 0
    while True:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target or n < 2:
            break
        if sweeps >= max_sweeps:
            raise NoConvergence(
                f"Jacobi iteration stalled with off-diagonal norm {off:.3e}", iterations=sweeps
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # columns p, q of the unitary D @ G, D = diag(1, conj(phase)) on (p, q)
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    v = v[:, order]
    residual = _eigen_residual(A, values.astype(complex), v)
    if residual > tol * scale:
        raise NoConvergence(
            f"Jacobi residual {residual:.3e} exceeds tolerance", iterations=sweeps
        )
    return EigenResult(values.astype(complex), v, residual)


def general_eigen(A, tol: float = DEFAULT_TOL, vectors: bool = True) -> EigenResult:
    """Eigenvalues of an arbitrary square matrix (LAPACK Hessenberg-QR).

    Eigenvalues are ordered by :func:`sort_order`.  The residual bound is
    ``tol * max(1, max|A|)``.  A real input is solved in real arithmetic,
    which keeps simple real eigenvalues exactly real.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NoConvergence("matrix contains non-finite entries")
    scale = max(1.0, max_abs(A))
    try:
        if vectors:
            values, vecs = np.linalg.eig(A)
        else:
            values, vecs = np.linalg.eigvals(A), None
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    values = np.asarray(values, dtype=complex)
    order = sort_order(values)
    values = values[order]
    if vecs is not None:
        vecs = np.asarray(vecs, dtype=complex)[:, order]
    residual = _eigen_residual(np.asarray(A, dtype=complex), values, vecs)
    if residual > tol * scale:
        raise NoConvergence(f"eigen residual {residual:.3e} exceeds tolerance")
    return EigenResult(values, vecs, residual)


def nullspace(A, tol: float = 1e-10, safety: float = 1e3) -> NullspaceBasis:
    """Right nullspace of an ``m x n`` matrix from its SVD.

    Directions whose singular value is at most ``tol * sigma_max`` are kept.
    The separation between the kept and the rejected singular values must
    exceed ``safety``; otherwise the numerical rank is ill-defined and
    :class:`AmbiguousRank` is raised.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("nullspace expects a 2-D matrix")
    m, n = A.shape
    if n == 0:
        return NullspaceBasis(0, [], math.inf, np.zeros(0))
    # full_matrices so that short-fat inputs expose all n right singular vectors
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    sv = np.zeros(n)
    sv[: len(s)] = s
    smax = float(sv.max()) if n else 0.0
    cutoff = tol * smax
    kept = sv <= cutoff
    if smax == 0.0:
        kept[:] = True
    k_vals = sv[kept]
    r_vals = sv[~kept]
    if len(r_vals) == 0:
        gap = math.inf
    elif len(k_vals) == 0:
        gap = float(r_vals.min() / cutoff) if cutoff > 0 else math.inf
    elif k_vals.max() == 0.0:
        gap = math.inf
    else:
        gap = float(r_vals.min() / k_vals.max())
    if gap < safety:
        raise AmbiguousRank(
            f"singular-value gap {gap:.3e} below safety factor {safety:.0e}", gap=gap
        )
    rows = vh.conj()[kept]
    return NullspaceBasis(int(kept.sum()), [row.copy() for row in rows], gap, sv)


def matrix_exponential_apply(A, v, tol: float = DEFAULT_TOL, max_terms: int = 200) -> np.ndarray:
    """Return ``expm(A) @ v``.

    The action is split into ``m`` equal substeps with ``||A||_1 / m <= 1``;
    each substep sums the Taylor series on the vector until the next term
    drops below ``tol * eps``-level relative size.  Fully deterministic and
    free of matrix-matrix products.
    """
    A = as_square(A)
    w = np.array(v, dtype=complex)
    if w.shape != (A.shape[0],):
        raise ValueError("vector length does not match the matrix")
    norm1 = float(np.max(np.sum(np.abs(A), axis=0))) if A.size else 0.0
    if norm1 == 0.0:
        return w
    steps = max(1, int(math.ceil(norm1)))
    B = A / steps
    term_tol = min(tol, 1e-16)
    for _ in range(steps):
        term = w.copy()
        acc = w.copy()
        for k in range(1, max_terms + 1):
            term = (B @ term) / k
            acc += term
            if np.linalg.norm(term) <= term_tol * max(np.linalg.norm(acc), 1e-300):
                break
        else:
            raise NoConvergence("Taylor series did not converge", iterations=max_terms)
        w = acc
    return w
