"""Small dense linear algebra for 4x4 states and 16x16 superoperators.

Matrices are plain ``numpy.ndarray`` objects of complex dtype.
"""
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import IndefiniteInput, NonHermitianInput, NonUnitaryInput

PSD_CLAMP = 1e-12
PSD_REJECT = 1e-9
NULLSPACE_RTOL = 1e-9


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray  # eigenvectors as columns

    def reconstruct(self):
        v = self.vectors
        return (v * self.values) @ v.conj().T


def _as_square(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitian_eig(m):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = _as_square(m)
    scale = max(np.linalg.norm(m), 1.0)
    if np.linalg.norm(m - m.conj().T) > 1e-9 * scale:
        raise NonHermitianInput("matrix is not Hermitian")
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    return EigenDecomposition(values, vectors)


def unitary_eig(u):
    """Eigendecomposition of a unitary matrix.

    A unitary matrix is normal, so its complex Schur form is diagonal and the
    Schur vectors are an orthonormal eigenbasis, also inside degenerate
    eigenspaces.
    """
    u = _as_square(u)
    n = u.shape[0]
    if np.linalg.norm(u.conj().T @ u - np.eye(n), ord=2) > 1e-8:
        raise NonUnitaryInput("matrix is not unitary")
    t, z = scipy.linalg.schur(u, output="complex")
    return EigenDecomposition(np.diag(t).copy(), z)


def psd_sqrt(m):
    """Principal square root of a positive-semidefinite Hermitian matrix."""
    values, vectors = hermitian_eig(m)
    if values.min() < -PSD_REJECT:
        raise IndefiniteInput(f"minimum eigenvalue {values.min():.3e} is negative")
    root = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * root) @ vectors.conj().T


def nullspace(m, tol=NULLSPACE_RTOL):
    """Orthonormal basis of the numerical kernel of a square matrix.

    A direction belongs to the kernel when its singular value is below
    ``tol`` times the largest singular value.
    """
    m = _as_square(m)
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return [row for row in np.eye(m.shape[0], dtype=complex)]
    return [vh[i].conj() for i in range(len(s)) if s[i] < tol * smax]


def period_dft(samples, kmax):
    """Fourier components of period samples, ``f(t) = sum_K f_K exp(-i K w t)``.

    ``samples`` has the time axis first, taken at ``t_j = j tau / Nt``.
    Returns an array whose first axis runs over K = -kmax..kmax.
    """
    samples = np.asarray(samples)
    nt = samples.shape[0]
    if nt < 2 * kmax + 1:
        raise ValueError("not enough samples for the requested kmax")
    coeffs = np.fft.ifft(samples, axis=0)
    idx = np.arange(-kmax, kmax + 1) % nt
    return coeffs[idx]


def fourier_synthesis(components, times, omega=1.0):
    """Evaluate ``sum_K c_K exp(-i K omega t)`` at each time in ``times``."""
    components = np.asarray(components)
    kmax = (components.shape[0] - 1) // 2
    ks = np.arange(-kmax, kmax + 1)
    phases = np.exp(-1j * omega * np.outer(np.asarray(times, dtype=float), ks))
    return np.tensordot(phases, components, axes=(1, 0))
