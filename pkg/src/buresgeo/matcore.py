"""Small fixed-size complex Hermitian linear algebra.

Everything here operates on dense square complex matrices held as
``numpy.ndarray`` (complex128). Sizes of interest are n <= 4, so we back
the heavy lifting (eigendecomposition, determinants) with numpy's LAPACK
bindings rather than hand-rolled iterations; the contracts below are what
the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, NotHermitian, NotPSD

HERMITICITY_TOL = 1e-10
PSD_CLAMP = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a square complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def hermitize(a) -> np.ndarray:
    """Hermitian part (A + A†)/2."""
    m = as_matrix(a)
    return (m + m.conj().T) / 2


def mul(a, b) -> np.ndarray:
    """Matrix product with a dimension check."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatch(f"cannot multiply {ma.shape} by {mb.shape}")
    return ma @ mb


def add(a, b) -> np.ndarray:
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatch(f"cannot add {ma.shape} and {mb.shape}")
    return ma + mb


def sub(a, b) -> np.ndarray:
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatch(f"cannot subtract {mb.shape} from {ma.shape}")
    return ma - mb


def scale(c: complex, a) -> np.ndarray:
    return c * as_matrix(a)


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def det(a) -> complex:
    return complex(np.linalg.det(as_matrix(a)))


def hermiticity_defect(a) -> float:
    """Max entrywise deviation of A from A†."""
    m = as_matrix(a)
    return float(np.max(np.abs(m - m.conj().T)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-data of a Hermitian matrix.

    eigenvalues are real and ascending; eigenvectors holds the orthonormal
    eigenvectors as columns, so ``V @ diag(w) @ V†`` reconstructs the input.
    Ties keep whatever order the solver produced.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(a, tol: float = HERMITICITY_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Raises NotHermitian if max |A - A†| entry exceeds ``tol`` and
    ConvergenceFailure if the underlying solver gives up.
    """
    m = as_matrix(a)
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > tol:
        raise NotHermitian(f"max |A - A^dag| entry = {defect:.3e} > {tol:.1e}")
    try:
        w, v = np.linalg.eigh(hermitize(m))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails at n<=4
        raise ConvergenceFailure(str(exc)) from exc
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def mat_func_hermitian(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar real function to a Hermitian matrix spectrally.

    Returns V f(w) V† where (w, V) = eig_hermitian(a). ``f`` must accept a
    real ndarray of eigenvalues.
    """
    spec = eig_hermitian(a)
    fw = np.asarray(f(spec.eigenvalues), dtype=np.complex128)
    v = spec.eigenvectors
    return (v * fw) @ v.conj().T


def mat_sqrt_psd(a, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Hermitian PSD square root.

    Eigenvalues in [-clamp, 0) are treated as zero (numerically singular
    states at chart boundaries); anything below -clamp raises NotPSD.
    """
    spec = eig_hermitian(a)
    w = spec.eigenvalues
    if np.any(w < -clamp):
        raise NotPSD(f"min eigenvalue {w.min():.3e} < -{clamp:.1e}")
    w = np.where(w < 0, 0.0, w)
    v = spec.eigenvectors
    return hermitize((v * np.sqrt(w)) @ v.conj().T)
