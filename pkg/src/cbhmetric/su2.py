"""Spin-j angular-momentum matrices.

Basis order is descending magnetic quantum number: row 0 carries m = +j.
With that ordering the complexified Hamiltonian ``-2i*gamma*Lz + 2*Lx`` has
``-(N-1)*i*gamma`` in its top-left corner.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidDimension


@dataclass(frozen=True)
class Generators:
    N: int
    j: float
    Lx: np.ndarray
    Ly: np.ndarray
    Lz: np.ndarray

    @property
    def m(self) -> np.ndarray:
        return self.j - np.arange(self.N)

    def raising(self) -> np.ndarray:
        return self.Lx + 1j * self.Ly

    def lowering(self) -> np.ndarray:
        return self.Lx - 1j * self.Ly

    def casimir(self) -> np.ndarray:
        return self.Lx @ self.Lx + self.Ly @ self.Ly + self.Lz @ self.Lz


def ladder_coefficients(N: int) -> np.ndarray:
    """Super-diagonal of the raising operator: sqrt(j(j+1) - m(m+1)) for m = j-1, ..., -j."""
    j = (N - 1) / 2
    m = j - np.arange(1, N)
    return np.sqrt(j * (j + 1) - m * (m + 1))


@lru_cache(maxsize=64)
def _build(N: int) -> Generators:
    j = (N - 1) / 2
    m = j - np.arange(N)
    lplus = np.diag(ladder_coefficients(N).astype(complex), 1)
    lminus = lplus.conj().T
    Lx = 0.5 * (lplus + lminus)
    Ly = (lplus - lminus) / 2j
    Lz = np.diag(m).astype(complex)
    for arr in (Lx, Ly, Lz):
        arr.setflags(write=False)
    return Generators(N, j, Lx, Ly, Lz)


def build_generators(N: int) -> Generators:
    """Return (Lx, Ly, Lz) for the N-dimensional irreducible representation.

    Raises
    ------
    InvalidDimension
        If ``N < 2``.
    """
    if int(N) != N or N < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {N!r}")
    return _build(int(N))
