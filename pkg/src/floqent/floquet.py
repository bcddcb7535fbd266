"""Floquet states of H(t) = H0 - A cos(w t) (sz1 + sz2)/2.

Conventions: a Floquet solution evolves as exp(-i g t) |u(t)>, with the
periodic mode expanded as |u(t)> = sum_K |u(K)> exp(-i K w t).
Quasienergies are folded into [-w/2, w/2).
"""
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment

from .errors import AmbiguousTracking, QuasienergyDegeneracy, StepSizeUnderflow
from .model import DRIVE_OP, DriveParams, EigenSystem, ModelParams, build_h0
from .numerics import period_dft, unitary_eig

DEFAULT_RTOL = 1e-10
TAIL_TOL = 1e-10
DEGENERACY_TOL = 1e-10
TRACKING_MARGIN = 0.05

_DRIVE_DIAG = np.diag(DRIVE_OP)


def default_kmax(d: DriveParams):
    return 2 * math.ceil(d.amplitude / d.omega) + 8


def default_nt(kmax):
    return 1 << max(2, math.ceil(math.log2(4 * kmax)))


def fold(quasienergy, omega=1.0):
    """Fold into the zone [-omega/2, omega/2)."""
    return (np.asarray(quasienergy) + omega / 2) % omega - omega / 2


def _integrate(h0, amplitudes, omega, t_end, rtol, dense=False):
    """Propagators U(t, 0) for a batch of drive amplitudes.

    Integrates i dU/dt = H(t) U with DOP853; returns the solver result whose
    state vector is the flattened (n_amp, 4, 4) stack.
    """
    amps = np.asarray(amplitudes, dtype=float)
    n = amps.size

    def rhs(t, y):
        u = y.reshape(n, 4, 4)
        hu = np.matmul(h0, u)
        hu -= (np.cos(omega * t) * amps)[:, None, None] * _DRIVE_DIAG[None, :, None] * u
        return (-1j * hu).ravel()

    y0 = np.broadcast_to(np.eye(4, dtype=complex), (n, 4, 4)).ravel()
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=rtol,
                    atol=rtol * 1e-2, dense_output=dense)
    if sol.status != 0:
        raise StepSizeUnderflow(f"propagator integration failed: {sol.message}")
    return sol


class _StaticPropagator:
    """Exact U(t, 0) = exp(-i H0 t) with the ``.sol(t)`` interface of a dense ODE result."""

    def __init__(self, h0):
        self.energies, self.vectors = np.linalg.eigh(h0)

    def sol(self, t):
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(t, self.energies))
        u = np.einsum("ik,...k,jk->...ij", self.vectors, phases, self.vectors.conj())
        return u.reshape(t.shape + (16,)).T if t.ndim else u.ravel()


def propagate_period(p: ModelParams, d: DriveParams, tol=DEFAULT_RTOL):
    """One-period propagator U(tau, 0)."""
    if not 1e-14 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-14, 1e-6]")
    sol = _integrate(build_h0(p), [d.amplitude], d.omega, d.period, tol)
    return sol.y[:, -1].reshape(4, 4)


@dataclass(frozen=True)
class FloquetSolution:
    quasienergies: np.ndarray   # (4,)
    modes0: np.ndarray          # (4, 4), column alpha is u_alpha(0)
    fourier_modes: np.ndarray   # (2 kmax + 1, 4, 4), [K + kmax, :, alpha] = u_alpha(K)
    period_samples: np.ndarray  # (nt, 4, 4), [j, :, alpha] = u_alpha(t_j)
    times: np.ndarray           # (nt,)
    kmax: int
    omega: float = 1.0
    labels: Optional[np.ndarray] = None  # labels[alpha] = H0 eigenstate index
    min_gap: float = float("inf")

    @property
    def nt(self):
        return len(self.times)

    def component(self, alpha, k):
        if abs(k) > self.kmax:
            return np.zeros(4, dtype=complex)
        return self.fourier_modes[k + self.kmax, :, alpha]

    def tail_weight(self):
        """Largest ||u_alpha(+-kmax)||^2 over alpha."""
        edge = np.concatenate([self.fourier_modes[0], self.fourier_modes[-1]], axis=1)
        return float(np.max(np.sum(np.abs(edge) ** 2, axis=0)))

    def relabel(self, perm):
        """Reorder the states so that index alpha becomes H0 label perm[alpha]."""
        perm = np.asarray(perm)
        order = np.argsort(perm)
        return replace(
            self,
            quasienergies=self.quasienergies[order],
            modes0=self.modes0[:, order],
            fourier_modes=self.fourier_modes[:, :, order],
            period_samples=self.period_samples[:, :, order],
            labels=np.arange(4),
        )

    def gauge_shift(self, alpha, m):
        """Move state alpha to another zone: g -> g + m w, u(K) -> u(K + m).

        Recomputed from the period samples with the K window widened by |m|,
        so no component is pushed out of it.
        """
        q = self.quasienergies.copy()
        q[alpha] += m * self.omega
        samples = self.period_samples.copy()
        samples[:, :, alpha] *= np.exp(1j * m * self.omega * self.times)[:, None]
        kmax = self.kmax + abs(int(m))
        if self.nt < 2 * kmax + 1:
            raise ValueError("too few period samples for this gauge shift")
        return replace(self, quasienergies=q, period_samples=samples, kmax=kmax,
                       fourier_modes=period_dft(samples, kmax))


def _min_circular_gap(q, omega):
    gaps = [abs(fold(a - b, omega)) for i, a in enumerate(q) for b in q[i + 1:]]
    return min(gaps)


def _floquet_from_dense(sol, p, d, kmax, nt):
    tau = d.period
    u_tau = sol.sol(tau).reshape(4, 4)
    eigvals, vecs = unitary_eig(u_tau)
    q = fold(-np.angle(eigvals) / tau, d.omega)
    times = np.arange(nt) * tau / nt
    u_t = sol.sol(times).T.reshape(nt, 4, 4)
    samples = np.matmul(u_t, vecs) * np.exp(1j * np.outer(times, q))[:, None, :]
    return FloquetSolution(
        quasienergies=q,
        modes0=vecs,
        fourier_modes=period_dft(samples, kmax),
        period_samples=samples,
        times=times,
        kmax=kmax,
        omega=d.omega,
        min_gap=_min_circular_gap(q, d.omega),
    )


def solve_floquet(p: ModelParams, d: DriveParams, kmax=None, nt=None,
                  tol=DEFAULT_RTOL, allow_degenerate=False):
    """Quasienergies, periodic modes and their Fourier components.

    With ``kmax=None`` the truncation starts at ``default_kmax`` and doubles
    until the edge components carry less than ``TAIL_TOL`` weight.
    """
    auto = kmax is None
    kmax = default_kmax(d) if auto else int(kmax)
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    nt = default_nt(kmax) if nt is None else int(nt)
    if nt < 2 * kmax + 2:
        raise ValueError("nt must be at least 2 kmax + 2")

    if d.amplitude == 0:
        # undriven: the exact exponential avoids integrator leakage into K != 0
        dense = _StaticPropagator(build_h0(p))
    else:
        dense = _integrate(build_h0(p), [d.amplitude], d.omega, d.period, tol, dense=True)
    out = _floquet_from_dense(dense, p, d, kmax, nt)
    while auto and out.tail_weight() > TAIL_TOL and kmax < 1024:
        kmax *= 2
        nt = max(nt, default_nt(kmax))
        out = _floquet_from_dense(dense, p, d, kmax, nt)

    if out.min_gap < DEGENERACY_TOL and not allow_degenerate:
        raise QuasienergyDegeneracy(
            f"folded quasienergies {out.quasienergies} are degenerate")
    return out


def direct_labels(sol: FloquetSolution, eig: EigenSystem):
    """Label each Floquet state by its largest overlap with an H0 eigenstate at t=0."""
    overlap = np.abs(eig.states.conj().T @ sol.modes0) ** 2  # [k, alpha]
    rows, cols = linear_sum_assignment(-overlap)
    perm = np.empty(4, dtype=int)
    perm[cols] = rows
    return perm


def _track(reference, candidates):
    """Assign each reference column (label) to a candidate column by overlap."""
    overlap = np.abs(reference.conj().T @ candidates)  # [label, candidate]
    ranked = np.sort(overlap, axis=1)
    if np.any(ranked[:, -1] - ranked[:, -2] < TRACKING_MARGIN):
        raise AmbiguousTracking("Floquet states could not be followed along the ramp")
    rows, cols = linear_sum_assignment(-overlap)
    return cols[np.argsort(rows)]  # cols[label] = candidate index


def label_floquet_states(sol: FloquetSolution, eig: EigenSystem, p: ModelParams,
                         d: DriveParams, steps=64, tol=1e-9):
    """Associate every Floquet state with the H0 eigenstate it tends to as A -> 0.

    The amplitude is ramped from 0 to ``d.amplitude`` in ``steps`` increments and
    each state is followed by maximal overlap of u(0) between consecutive steps.
    Returns ``perm`` with ``perm[alpha]`` the H0 eigenstate index of state alpha.
    """
    reference = eig.states
    if d.amplitude > 0:
        amps = d.amplitude * np.arange(1, steps + 1) / steps
        batch = _integrate(build_h0(p), amps, d.omega, d.period, tol)
        u_tau = batch.y[:, -1].reshape(steps, 4, 4)
        for u in u_tau:
            # tracking only needs eigenvectors, so polish the looser ramp propagators
            vecs = unitary_eig(scipy.linalg.polar(u)[0]).vectors
            reference = vecs[:, _track(reference, vecs)]
    match = _track(reference, sol.modes0)  # match[label] = alpha
    perm = np.empty(4, dtype=int)
    perm[match] = np.arange(4)
    return perm
