"""Wootters concurrence of two-qubit states."""
from typing import NamedTuple

import numpy as np

from .dynamics import DensityMatrix, EvolutionRecord
from .errors import NonPhysicalInput, UnknownBasis
from .model import SIGMA_Y
from .numerics import psd_sqrt

SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)


class ConcurrenceResult(NamedTuple):
    value: float
    spin_flipped_spectrum: np.ndarray  # decreasing


def _validated(rho):
    if isinstance(rho, DensityMatrix):
        if rho.basis != "computational":
            raise UnknownBasis("concurrence needs a computational-basis state")
        rho = rho.entries
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise NonPhysicalInput("expected a 4x4 density matrix")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise NonPhysicalInput("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-9:
        raise NonPhysicalInput("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise NonPhysicalInput("density matrix is not positive semidefinite")
    return rho


def spin_flip(rho):
    return SPIN_FLIP @ np.conj(rho) @ SPIN_FLIP


def concurrence(rho, method="product"):
    """Concurrence max(0, l1 - l2 - l3 - l4) with l1 the largest.

    ``method="product"`` takes the l's as square roots of the eigenvalues of
    rho @ rho_tilde, obtained as singular values of X^T (sy sy) X with
    rho = X X^dagger; taking square roots of the eigenvalues directly would
    turn roundoff near zero into errors of order 1e-8.
    ``method="sqrt"`` diagonalizes sqrt(sqrt(rho) rho_tilde sqrt(rho)).
    """
    rho = _validated(rho)
    if method == "product":
        values, vectors = np.linalg.eigh(rho)
        x = vectors * np.sqrt(np.clip(values, 0.0, None))
        lam = np.linalg.svd(x.T @ SPIN_FLIP @ x, compute_uv=False)
    elif method == "sqrt":
        flipped = spin_flip(rho)
        s = psd_sqrt(rho)
        inner = s @ flipped @ s
        inner = 0.5 * (inner + inner.conj().T)
        lam = np.linalg.eigvalsh(psd_sqrt(inner))
        lam = np.clip(lam, 0.0, None)
    else:
        raise ValueError(f"unknown method {method!r}")
    lam = np.sort(lam)[::-1]
    value = max(0.0, lam[0] - lam[1:].sum())
    return ConcurrenceResult(min(value, 1.0), lam)


def nearest_physical(rho):
    """Clip negative eigenvalues and restore unit trace.

    Returns the projected matrix and the most negative eigenvalue removed.
    Redfield-type generators can leave eigenvalues slightly below zero.
    """
    rho = np.asarray(rho, dtype=complex)
    values, vectors = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    clipped = np.clip(values, 0.0, None)
    out = (vectors * (clipped / clipped.sum())) @ vectors.conj().T
    return 0.5 * (out + out.conj().T), float(min(values.min(), 0.0))


def concurrence_trace(rec: EvolutionRecord):
    """C at every stroboscopic instant of an evolution record.

    States are projected with ``nearest_physical`` first, since trajectories
    are accepted down to the evolution's own positivity tolerance.
    """
    states = rec.computational_states()
    return [(float(t), concurrence(nearest_physical(rho)[0]).value)
            for t, rho in zip(rec.times, states)]
