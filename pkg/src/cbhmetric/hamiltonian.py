"""Bose-Hubbard matrices in the su(2) representation and their spectra.

Hermitian branch:      h = 2*eps*Lz + 2*v*Lx + 2*c*Lz^2
Complexified branch:   H = -2i*gamma*Lz + 2*v*Lx + 2*c*Lz^2

At c = 0, v = 1 the spectrum of H is 2*sqrt(1 - gamma^2) * m, real inside
|gamma| < 1 and exceptional at gamma = +-1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, Unsupported
from .numerics import general_eigen, max_abs
from .su2 import build_generators

PHASES = ("unbroken", "boundary", "broken")


@dataclass(frozen=True)
class CbhParams:
    N: int
    epsilon: float = 0.0
    gamma: float = 0.0
    v: float = 1.0
    c: float = 0.0
    allow_zero_v: bool = False

    def __post_init__(self):
        if self.epsilon != 0.0 and self.gamma != 0.0:
            raise InvalidParams("epsilon and gamma cannot both be nonzero")
        if self.v == 0.0 and not self.allow_zero_v:
            raise InvalidParams("tunneling strength v must be nonzero (pass allow_zero_v=True)")


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    max_imag: float
    is_real: bool
    tolerance: float
    method: str = "complex"

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.eigenvalues.real)


@dataclass(frozen=True)
class PhaseVerdict:
    phase: str
    gamma: float
    ep_distance: float
    method: str = "closed_form"
    spectrum: SpectrumReport | None = None


def build_hermitian_bh(p: CbhParams) -> np.ndarray:
    if p.gamma != 0.0:
        raise InvalidParams("the Hermitian builder requires gamma = 0")
    g = build_generators(p.N)
    return 2 * p.epsilon * g.Lz + 2 * p.v * g.Lx + 2 * p.c * (g.Lz @ g.Lz)


def build_cbh(p: CbhParams) -> np.ndarray:
    if p.epsilon != 0.0:
        raise InvalidParams("the complexified builder requires epsilon = 0")
    g = build_generators(p.N)
    return -2j * p.gamma * g.Lz + 2 * p.v * g.Lx + 2 * p.c * (g.Lz @ g.Lz)


def cbh(N: int, gamma: float, v: float = 1.0, c: float = 0.0) -> np.ndarray:
    """Shorthand for ``build_cbh(CbhParams(N, gamma=gamma, v=v, c=c))``."""
    return build_cbh(CbhParams(N, gamma=gamma, v=v, c=c))


def flip(N: int) -> np.ndarray:
    """Anti-diagonal permutation (reflection about the second diagonal)."""
    return np.fliplr(np.eye(N))


def is_pt_symmetric(H, tol: float = 1e-12) -> bool:
    """True when conj(H) = P H P for the anti-diagonal flip P."""
    H = np.asarray(H, dtype=complex)
    P = flip(H.shape[0])
    return max_abs(H.conj() - P @ H @ P) <= tol * max(1.0, max_abs(H))


def real_form(H) -> np.ndarray:
    """Unitarily equivalent real matrix of a PT-symmetric H.

    With U = exp(-i pi/4) (I + iP) / sqrt(2) one has conj(U) = P U, so
    U^H H U is real whenever conj(H) = P H P.
    """
    H = np.asarray(H, dtype=complex)
    N = H.shape[0]
    U = np.exp(-0.25j * np.pi) * (np.eye(N) + 1j * flip(N)) / np.sqrt(2)
    return (U.conj().T @ H @ U).real


def spectrum(H, tol: float = 1e-9) -> SpectrumReport:
    """Sorted eigenvalues of ``H`` and a reality verdict.

    PT-symmetric inputs are diagonalized through :func:`real_form`; in real
    arithmetic a simple real eigenvalue cannot acquire an imaginary part from
    round-off, which keeps the verdict reliable close to the exceptional point
    where the complex eigenproblem is badly conditioned.
    """
    H = np.asarray(H, dtype=complex)
    if is_pt_symmetric(H):
        values = general_eigen(real_form(H), vectors=False).eigenvalues
        method = "real_form"
    else:
        values = general_eigen(H, vectors=False).eigenvalues
        method = "complex"
    max_imag = float(np.max(np.abs(values.imag))) if len(values) else 0.0
    return SpectrumReport(values, max_imag, max_imag <= tol, tol, method)


def exact_cbh_spectrum(N: int, gamma: float) -> np.ndarray:
    """Closed form (2k - N + 1) * sqrt(1 - gamma^2), valid for c = 0, v = 1."""
    k = np.arange(N)
    return (2 * k - N + 1) * np.sqrt(complex(1 - gamma * gamma))


def classify_phase(p: CbhParams, tol: float = 1e-9, boundary_tol: float = 1e-6) -> PhaseVerdict:
    """Classify gamma as unbroken / boundary / broken.

    For c = 0, v = 1 the exceptional points sit at gamma = +-1 and the verdict
    is read off |gamma|.  Otherwise only the numerical spectrum is consulted
    and an :class:`Unsupported` warning flags the fallback.
    """
    if p.epsilon != 0.0:
        raise InvalidParams("phase classification applies to the complexified branch")
    rep = spectrum(build_cbh(p), tol)
    gamma = float(p.gamma)
    if p.c != 0.0 or p.v != 1.0:
        warnings.warn(
            "closed-form exceptional points are known only for c = 0, v = 1; "
            "using the spectral test",
            Unsupported,
            stacklevel=2,
        )
        separated = bool(np.all(rep.gaps > tol)) if len(rep.gaps) else True
        phase = "unbroken" if rep.is_real and separated else "broken"
        return PhaseVerdict(phase, gamma, float("nan"), "spectral", rep)

    dist = 1.0 - abs(gamma)
    if abs(dist) <= boundary_tol:
        phase = "boundary"
    elif dist > 0:
        phase = "unbroken"
    else:
        phase = "broken"
    return PhaseVerdict(phase, gamma, dist, "closed_form", rep)
