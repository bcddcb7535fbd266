"""Two coupled flux-type qubits: static Hamiltonian, ac drive and bath coupling.

Basis ordering is (|00>, |01>, |10>, |11>) with sigma_z|0> = +|0>, and
hbar = omega = 1 throughout.
"""
import warnings
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateSpectrum, ResonantDenominator
from .numerics import hermitian_eig

SIGMA_Z = np.diag([1.0, -1.0])
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]])
SIGMA_MINUS = SIGMA_PLUS.T
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
_I2 = np.eye(2)

# total sigma_z / 2, the operator the drive multiplies
DRIVE_OP = np.diag([1.0, 0.0, 0.0, -1.0])

LABELS = ("s0", "e-", "e+", "s1")

_SQ2 = np.sqrt(2.0)
# The antisymmetric reference is (|10> - |01>)/sqrt2: with this basis the
# first-order admixture signs below come out consistent only with this phase.
ZEROTH_ORDER = {
    "s0": np.array([1.0, 0.0, 0.0, 0.0], dtype=complex),
    "e-": np.array([0.0, -1.0, 1.0, 0.0], dtype=complex) / _SQ2,
    "e+": np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) / _SQ2,
    "s1": np.array([0.0, 0.0, 0.0, 1.0], dtype=complex),
}


def on_qubit(op, i):
    """Embed a single-qubit operator on qubit ``i`` (1 or 2)."""
    return np.kron(op, _I2) if i == 1 else np.kron(_I2, op)


@dataclass(frozen=True)
class ModelParams:
    eps0: float = 3.7
    delta1: float = 0.1
    delta2: float = 0.15
    J: float = -2.5
    omega: float = 1.0

    def __post_init__(self):
        if self.delta1 < 0 or self.delta2 < 0:
            raise ValueError("tunnelling amplitudes must be non-negative")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def eps_c(self):
        return abs(self.J) / 2

    @property
    def delta_bar(self):
        return (self.delta1 + self.delta2) / 2

    @property
    def crossover_amplitude(self):
        """Drive amplitude needed to reach the avoided crossing, |eps0| - eps_c."""
        return abs(self.eps0) - self.eps_c


@dataclass(frozen=True)
class DriveParams:
    amplitude: float = 3.8
    omega: float = 1.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("drive amplitude must be non-negative")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def period(self):
        return 2 * np.pi / self.omega


@dataclass(frozen=True)
class EigenSystem:
    energies: np.ndarray
    states: np.ndarray  # columns |0>..|3>
    labels: Dict[str, int] = field(default_factory=dict)

    def state(self, label):
        return self.states[:, self.labels[label]]

    def ordering(self):
        """Labels in energy order, e.g. ('s0', 'e-', 'e+', 's1')."""
        inverse = {k: name for name, k in self.labels.items()}
        return tuple(inverse[k] for k in range(len(self.energies)))


def build_h0(p: ModelParams):
    h = np.zeros((4, 4), dtype=complex)
    for i, delta in ((1, p.delta1), (2, p.delta2)):
        h += -0.5 * p.eps0 * on_qubit(SIGMA_Z, i) - 0.5 * delta * on_qubit(SIGMA_X, i)
    flip_flop = np.kron(SIGMA_PLUS, SIGMA_MINUS) + np.kron(SIGMA_MINUS, SIGMA_PLUS)
    return h - 0.5 * p.J * flip_flop


def build_drive(p: ModelParams, d: DriveParams, t):
    """V(t) = -A cos(w t) (sz1 + sz2) / 2."""
    return -d.amplitude * np.cos(d.omega * t) * DRIVE_OP.astype(complex)


def build_coupling_op(gamma1, xi):
    """System side of the bath coupling, gamma1 sz1 + gamma2 sz2 with gamma2 = xi gamma1."""
    if not 0.0 <= xi <= 1.0:
        warnings.warn(f"coupling asymmetry xi={xi} is outside [0, 1]", stacklevel=2)
    gamma2 = xi * gamma1
    return (gamma1 * on_qubit(SIGMA_Z, 1) + gamma2 * on_qubit(SIGMA_Z, 2)).astype(complex)


def assign_labels(states):
    """Map each zeroth-order label to the column of ``states`` it overlaps most.

    Solved as an assignment problem so the map is a bijection; ties go to the
    lower-energy column.
    """
    overlap = np.array([[abs(np.vdot(ZEROTH_ORDER[name], states[:, k])) ** 2
                         for k in range(4)] for name in LABELS])
    # tiny energy-ordered bias breaks exact ties deterministically
    bias = 1e-12 * np.arange(4)[None, :]
    rows, cols = linear_sum_assignment(-(overlap - bias))
    return {LABELS[r]: int(c) for r, c in zip(rows, cols)}


def diagonalize_h0(p: ModelParams):
    energies, states = hermitian_eig(build_h0(p))
    if np.min(np.diff(energies)) < 1e-12:
        raise DegenerateSpectrum(f"degenerate H0 spectrum at {p}")
    return EigenSystem(energies, states, assign_labels(states))


def perturbative_eigenstates(p: ModelParams):
    """First-order eigenstates of H0 in the tunnelling amplitudes.

    Returns a dict keyed by 's0', 's1', 'e-', 'e+' of normalized vectors.
    """
    largest = max(p.delta1, p.delta2)
    plus, minus = p.eps0 + p.J / 2, p.eps0 - p.J / 2
    if min(abs(plus), abs(minus)) < 10 * largest:
        raise ResonantDenominator("eps0 is too close to +-J/2 for perturbation theory")
    if largest > 0.1 * abs(p.eps0):
        warnings.warn("tunnelling amplitudes are not small against eps0", stacklevel=2)
    d_minus = (p.delta1 - p.delta2) / (2 * _SQ2)
    d_plus = (p.delta1 + p.delta2) / (2 * _SQ2)
    z = ZEROTH_ORDER
    states = {
        "s0": z["s0"] + d_minus / plus * z["e-"] + d_plus / minus * z["e+"],
        "s1": z["s1"] + d_minus / minus * z["e-"] - d_plus / plus * z["e+"],
        "e-": z["e-"] - d_minus / plus * z["s0"] - d_minus / minus * z["s1"],
        "e+": z["e+"] - d_plus / minus * z["s0"] + d_plus / plus * z["s1"],
    }
    return {k: v / np.linalg.norm(v) for k, v in states.items()}
