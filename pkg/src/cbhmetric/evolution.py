"""Time evolution under a quasi-Hermitian H and norm audits in the Theta inner product."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveMetric
from .numerics import DEFAULT_TOL, hermitian_eigen, matrix_exponential_apply, max_abs


@dataclass(frozen=True)
class EvolutionTrace:
    times: np.ndarray
    states: np.ndarray
    theta_norms: np.ndarray
    naive_norms: np.ndarray
    max_drift: float

    @property
    def naive_variation(self) -> float:
        return float(self.naive_norms.max() - self.naive_norms.min())


@dataclass(frozen=True)
class ObservableCandidate:
    matrix: np.ndarray
    compatibility_residual: float
    tolerance: float

    @property
    def compatible(self) -> bool:
        return self.compatibility_residual <= self.tolerance


def _theta(theta):
    return np.asarray(getattr(theta, "matrix", theta), dtype=complex)


def theta_inner(theta, phi, psi) -> complex:
    """<phi|Theta|psi>."""
    return complex(np.vdot(phi, _theta(theta) @ psi))


def evolve(H, theta, psi0, times, tol: float = DEFAULT_TOL,
           require_positive: bool = True) -> EvolutionTrace:
    """Propagate psi(t) = exp(-iHt) psi0 and record both norms at each time.

    Each state is computed directly from ``psi0`` (no accumulation across
    time steps).  ``theta`` must be positive definite unless
    ``require_positive`` is False.
    """
    H = np.asarray(H, dtype=complex)
    T = _theta(theta)
    psi0 = np.asarray(psi0, dtype=complex)
    if not np.any(psi0):
        raise ValueError("initial state must be nonzero")
    if require_positive:
        lo = hermitian_eigen(T).eigenvalues.real[0]
        if lo <= 0:
            raise NonPositiveMetric(f"metric has eigenvalue {lo:.3e} <= 0")
    times = np.asarray(times, dtype=float)
    states = np.array([matrix_exponential_apply(-1j * t * H, psi0, tol) for t in times])
    theta_norms = np.einsum("ti,ij,tj->t", states.conj(), T, states).real
    naive_norms = np.einsum("ti,ti->t", states.conj(), states).real
    drift = float(np.max(np.abs(theta_norms - theta_norms[0]))) if len(times) else 0.0
    return EvolutionTrace(times, states, theta_norms, naive_norms, drift)


def propagate_eigen(H, psi0, t: float) -> np.ndarray:
    """exp(-iHt) psi0 through the eigen-decomposition of H (diagonalizable H only)."""
    vals, vecs = np.linalg.eig(np.asarray(H, dtype=complex))
    coeff = np.linalg.solve(vecs, np.asarray(psi0, dtype=complex))
    return vecs @ (np.exp(-1j * vals * t) * coeff)


def energy_expectation(H, theta, psi) -> complex:
    """<psi|Theta H|psi> / <psi|Theta|psi>; real when H is Theta-Hermitian."""
    T = _theta(theta)
    psi = np.asarray(psi, dtype=complex)
    return complex(np.vdot(psi, T @ (np.asarray(H) @ psi)) / np.vdot(psi, T @ psi))


def check_observable(lam, theta, tol: float = 1e-10) -> ObservableCandidate:
    """Compatibility of an observable with a metric: residual max|L^H Theta - Theta L|."""
    lam = np.asarray(lam, dtype=complex)
    T = _theta(theta)
    if lam.shape != T.shape:
        raise ValueError("observable and metric dimensions differ")
    return ObservableCandidate(lam, max_abs(lam.conj().T @ T - T @ lam), tol)
