"""Floquet-Markov evolution, steady states and basis changes."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bath import GeneratorQ0
from .errors import DegenerateSteadyState, NonphysicalState, UnknownBasis
from .floquet import FloquetSolution
from .model import EigenSystem
from .numerics import fourier_synthesis, nullspace

BASES = ("computational", "eigenstate", "floquet")
NONPHYSICAL_TOL = 1e-6
# kernel threshold relative to the largest singular value; metastable states
# with relaxation near 1e-11 of the fastest scale must stay outside the kernel
STEADY_RTOL = 1e-13


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray
    basis: str = "computational"
    time: float = 0.0  # in drive periods

    def __post_init__(self):
        if self.basis not in BASES:
            raise UnknownBasis(self.basis)

    @property
    def trace(self):
        return complex(np.trace(self.entries))

    def eigenvalues(self):
        return np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))

    def populations(self):
        return np.real(np.diag(self.entries)).copy()

    def is_physical(self, herm_tol=1e-10, trace_tol=1e-9, pos_tol=1e-8):
        rho = self.entries
        return (np.abs(rho - rho.conj().T).max() <= herm_tol
                and abs(self.trace - 1) <= trace_tol
                and self.eigenvalues().min() >= -pos_tol)


@dataclass(frozen=True)
class EvolutionRecord:
    times: np.ndarray        # (N,) in periods
    states: np.ndarray       # (N, 4, 4) Floquet basis
    populations: np.ndarray  # (N, 4) eigenstate basis
    frame: np.ndarray        # u_alpha(0) columns, maps Floquet -> computational

    def computational_states(self):
        f = self.frame
        return np.matmul(np.matmul(f, self.states), f.conj().T)


def initial_state(eig: EigenSystem, sol: FloquetSolution):
    """H0 ground state expressed in the Floquet basis at t = 0."""
    c = sol.modes0.conj().T @ eig.states[:, 0]
    return DensityMatrix(np.outer(c, c.conj()), "floquet", 0.0)


def evolve(gen: GeneratorQ0, sol: FloquetSolution, rho0: DensityMatrix, horizon,
           stride=1, eig: EigenSystem = None):
    """Stroboscopic trajectory at t = m * stride periods, m = 0 .. horizon // stride.

    The generator is time independent, so one-stride propagation is the exact
    matrix exponential applied repeatedly.
    """
    if horizon < 1 or stride < 1:
        raise ValueError("horizon and stride must be >= 1")
    if rho0.basis != "floquet":
        raise UnknownBasis("evolve expects a Floquet-basis initial state")
    tau = 2 * np.pi / sol.omega
    step = scipy.linalg.expm(gen.matrix() * (stride * tau))
    n = horizon // stride
    vecs = np.empty((n + 1, 16), dtype=complex)
    vecs[0] = rho0.entries.ravel()
    for m in range(n):
        vecs[m + 1] = step @ vecs[m]
    states = vecs.reshape(n + 1, 4, 4)

    herm = 0.5 * (states + states.conj().transpose(0, 2, 1))
    lowest = np.linalg.eigvalsh(herm).min()
    if lowest < -NONPHYSICAL_TOL:
        raise NonphysicalState(f"density matrix eigenvalue {lowest:.2e} along trajectory")

    frame = sol.modes0
    if eig is None:
        pops = np.real(np.diagonal(states, axis1=1, axis2=2))
    else:
        to_eig = eig.states.conj().T @ frame
        rotated = np.matmul(np.matmul(to_eig, states), to_eig.conj().T)
        pops = np.real(np.diagonal(rotated, axis1=1, axis2=2))
    times = np.arange(n + 1) * stride
    return EvolutionRecord(times.astype(float), states, pops, frame)


def steady_state(gen: GeneratorQ0, sol: FloquetSolution = None, tol=STEADY_RTOL):
    """Kernel of the full generator, normalized to unit trace (Floquet basis)."""
    m = gen.matrix()
    kernel = nullspace(m, tol)
    if not kernel:
        # tolerance too strict for this generator: fall back to the least singular direction
        kernel = [np.linalg.svd(m)[2][-1].conj()]
    if len(kernel) > 1:
        candidates = [_normalize(v.reshape(4, 4)) for v in _trace_basis(kernel)]
        raise DegenerateSteadyState(
            f"steady-state kernel has dimension {len(candidates)}",
            [DensityMatrix(c, "floquet", np.inf) for c in candidates])
    return DensityMatrix(_normalize(kernel[0].reshape(4, 4)), "floquet", np.inf)


def _trace_basis(kernel):
    # rotate the kernel so only its first vector carries trace, then keep the
    # traceful combinations: v0 and v0 + v_k span the same space
    traces = np.array([np.trace(v.reshape(4, 4)) for v in kernel])
    lead = kernel[int(np.argmax(np.abs(traces)))]
    t0 = np.trace(lead.reshape(4, 4))
    if abs(t0) < 1e-12:
        return [lead]
    out = [lead]
    for v, t in zip(kernel, traces):
        if v is lead:
            continue
        w = v - (t / t0) * lead  # traceless
        out.append(lead + w * (abs(t0) / np.linalg.norm(w)))
    return out


def _normalize(rho):
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def period_average(rho_inf: DensityMatrix, sol: FloquetSolution):
    """One-period average of sum_ab rho_ab |u_a(t)><u_b(t)| in the computational basis."""
    if rho_inf.basis != "floquet":
        raise UnknownBasis("period_average expects a Floquet-basis state")
    u = sol.period_samples
    avg = np.matmul(np.matmul(u, rho_inf.entries), u.conj().transpose(0, 2, 1)).mean(axis=0)
    return DensityMatrix(_normalize(avg), "computational", rho_inf.time)


def floquet_frame(sol: FloquetSolution, t=0.0):
    """Columns u_alpha(t) in the computational basis (t in units of 1/omega)."""
    tau = 2 * np.pi / sol.omega
    if np.isclose(t % tau, 0.0) or np.isclose(t % tau, tau):
        return sol.modes0
    frame = fourier_synthesis(sol.fourier_modes, [t], sol.omega)[0]
    return scipy.linalg.polar(frame)[0]


def _frame(basis, sol, eig, t):
    if basis == "computational":
        return np.eye(4, dtype=complex)
    if basis == "eigenstate":
        return eig.states
    if basis == "floquet":
        return floquet_frame(sol, t)
    raise UnknownBasis(basis)


def to_basis(rho: DensityMatrix, target, sol: FloquetSolution = None,
             eig: EigenSystem = None, t=0.0):
    """Similarity transform of ``rho`` into ``target`` basis at time ``t``."""
    if target not in BASES:
        raise UnknownBasis(target)
    src = _frame(rho.basis, sol, eig, t)
    dst = _frame(target, sol, eig, t)
    comp = src @ rho.entries @ src.conj().T
    return DensityMatrix(dst.conj().T @ comp @ dst, target, rho.time)
