"""Ohmic bath, Floquet-Markov rate tensor and transition-rate tables.

Rate tables are indexed final-state first: ``rates[f, i]`` is the rate of the
transfer i -> f.  A transfer releases energy to the bath when the final state
lies lower, which the thermal weight ``g`` evaluates at a negative argument.

All reported rates carry the golden-rule factor 2 pi (hbar = 1) so the
eigenstate, effective and Floquet tables share one scale.  The master-equation
generator is built from the rate tensor without that factor.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ResonantDenominator, TraceLeak
from .floquet import FloquetSolution
from .model import LABELS, EigenSystem, ModelParams

RATE_PREFACTOR = 2 * np.pi


@dataclass(frozen=True)
class BathParams:
    kappa: float = 0.001
    temperature: float = 0.00467
    cutoff: float = 10.0
    gamma1: float = 1.0
    xi: float = 0.1

    def __post_init__(self):
        if self.kappa <= 0 or self.temperature <= 0 or self.cutoff <= 0:
            raise ValueError("kappa, temperature and cutoff must be positive")


@dataclass(frozen=True)
class RateTable:
    rates: np.ndarray       # (4, 4), rates[f, i]
    per_photon: np.ndarray  # (n_photon, 4, 4)
    photons: np.ndarray     # photon index of each per_photon slice
    basis: str              # 'floquet' | 'eigenstate' | 'effective'

    def __getitem__(self, fi):
        return float(self.rates[fi])


@dataclass(frozen=True)
class GeneratorQ0:
    """Period-averaged generator; d rho_ab/dt = -i(g_a - g_b) rho_ab - sum L[a,b,c,d] rho_cd."""
    coefficients: np.ndarray  # (4, 4, 4, 4)
    quasienergies: np.ndarray
    flavor: str = "full"

    @property
    def quasienergy_part(self):
        q = self.quasienergies
        return -1j * (q[:, None] - q[None, :])

    def matrix(self):
        """16x16 superoperator acting on row-major vec(rho)."""
        m = -self.coefficients.reshape(16, 16).astype(complex)
        return m + np.diag(self.quasienergy_part.ravel())

    def apply(self, rho):
        return (self.matrix() @ np.asarray(rho, dtype=complex).ravel()).reshape(4, 4)


def spectral_density(omega_arg, b: BathParams):
    w = np.asarray(omega_arg, dtype=float)
    return b.kappa * w * np.exp(-np.abs(w) / b.cutoff)


def _occupation_terms(w, b):
    # returns n(|w|) + [w < 0], i.e. n(w) times sign(w), finite for all w != 0
    x = np.abs(w) / b.temperature
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        n_abs = np.exp(-x) / -np.expm1(-x)
    return n_abs + (w < 0)


def thermal_weight(omega_arg, b: BathParams):
    """g(w) = J(w) n_th(w); equals kappa T at w = 0."""
    w = np.asarray(omega_arg, dtype=float)
    zero = w == 0
    safe = np.where(zero, 1.0, w)
    g = b.kappa * np.abs(safe) * np.exp(-np.abs(safe) / b.cutoff) * _occupation_terms(safe, b)
    g = np.where(zero, b.kappa * b.temperature, g)
    return g if g.ndim else float(g)


def log_thermal_weight(omega_arg, b: BathParams):
    """log g(w), evaluated without forming exp(|w|/T)."""
    w = np.asarray(omega_arg, dtype=float)
    if np.any(w == 0):
        raise ValueError("log weight is only defined away from w = 0")
    x = np.abs(w) / b.temperature
    log_occ = np.where(w < 0, 0.0, -x) - np.log(-np.expm1(-x))
    out = np.log(b.kappa * np.abs(w)) - np.abs(w) / b.cutoff + log_occ
    return out if out.ndim else float(out)


def photon_range(a_table):
    kk = (a_table.shape[0] - 1) // 2
    return np.arange(-kk, kk + 1)


def transition_elements(sol: FloquetSolution, coupling):
    """A^K[a, b] = sum_L <u_a(L)| A |u_b(L + K)> for |K| <= 2 kmax.

    Returned array has the photon index on its first axis, K = -2 kmax..2 kmax.
    """
    coupling = np.asarray(coupling, dtype=complex)
    if np.linalg.norm(coupling - coupling.conj().T) > 1e-12 * max(1.0, np.linalg.norm(coupling)):
        raise ValueError("coupling operator must be Hermitian")
    u = sol.fourier_modes                  # (nL, 4, 4)
    bra = u.conj().transpose(0, 2, 1)      # (nL, alpha, 4)
    ket = np.matmul(coupling, u)           # (nL, 4, beta)
    n = u.shape[0]
    out = np.zeros((2 * n - 1, 4, 4), dtype=complex)
    for shift in range(-(n - 1), n):
        lo, hi = max(0, -shift), min(n, n - shift)
        out[shift + n - 1] = np.einsum("lai,lib->ab", bra[lo:hi], ket[lo + shift:hi + shift])
    return out


def thermal_table(quasienergies, ks, b: BathParams, omega=1.0):
    """g^K[a, b] = g(g_a - g_b - K w), paired with A^K of ``transition_elements``."""
    q = np.asarray(quasienergies)
    diff = q[:, None] - q[None, :]
    return thermal_weight(diff[None, :, :] - np.asarray(ks)[:, None, None] * omega, b)


def rate_tensor(g_table, a_table):
    """R[a, b, c, d] = sum_K g^K[a, c] A^K[a, c] conj(A^K[b, d])."""
    return np.einsum("kac,kac,kbd->abcd", g_table, a_table, a_table.conj())


def generator_q0(r_tensor, quasienergies):
    """Period-averaged Floquet-Markov generator built from the rate tensor."""
    r = np.asarray(r_tensor)
    eye = np.eye(4)
    loss = np.einsum("eeca->ac", r)  # sum_eta R[eta, eta, c, a], indexed [a, c]
    coeffs = (np.einsum("bd,ac->abcd", eye, loss)
              + np.einsum("ac,bd->abcd", eye, loss.conj())
              - r
              - np.transpose(r, (1, 0, 3, 2)).conj())
    gen = GeneratorQ0(coeffs, np.asarray(quasienergies, dtype=float), "full")
    _check_trace(gen)
    return gen


def generator_secular(r_tensor, quasienergies):
    """Lindblad generator with jumps |a><b|, keeping only the secular couplings.

    Jump rates are 2 Re R[a, a, b, b], which reproduces the population block of
    ``generator_q0`` exactly.
    """
    r = np.asarray(r_tensor)
    jump = 2 * np.real(np.einsum("aabb->ab", r))  # jump[a, b]: b -> a
    eye = np.eye(4)
    out_rate = jump.sum(axis=0)
    coeffs = (-np.einsum("ab,cd,ac->abcd", eye, eye, jump)
              + 0.5 * np.einsum("ac,bd->abcd", eye, eye) * (out_rate[:, None] + out_rate[None, :])[:, :, None, None])
    gen = GeneratorQ0(coeffs.astype(complex), np.asarray(quasienergies, dtype=float), "secular")
    _check_trace(gen)
    return gen


def _check_trace(gen):
    leak = np.einsum("aacd->cd", gen.coefficients)
    scale = max(1.0, float(np.abs(gen.coefficients).max()))
    if np.abs(leak).max() > 1e-10 * scale:
        raise TraceLeak("generator does not preserve the trace")


def floquet_rates(g_table, a_table):
    """Gamma[a, b] = 2 pi sum_n g(g_a - g_b - n w) |A^n[a, b]|^2."""
    per = RATE_PREFACTOR * g_table * np.abs(a_table) ** 2
    return RateTable(per.sum(axis=0), per, photon_range(a_table), "floquet")


def fgr_rates(eig: EigenSystem, coupling, b: BathParams):
    """Golden-rule rates between H0 eigenstates, rates[f, i] = 2 pi g(E_f - E_i) |<f|A|i>|^2."""
    elements = eig.states.conj().T @ np.asarray(coupling) @ eig.states
    e = eig.energies
    rates = RATE_PREFACTOR * thermal_weight(e[:, None] - e[None, :], b) * np.abs(elements) ** 2
    return RateTable(rates, rates[None], np.array([0]), "eigenstate")


def perturbative_matrix_elements(p: ModelParams, b: BathParams):
    """|<f|A|i>|^2 to leading order in the tunnelling amplitudes, by label pair."""
    largest = max(p.delta1, p.delta2)
    plus, minus = p.eps0 + p.J / 2, p.eps0 - p.J / 2
    if min(abs(plus), abs(minus)) < 10 * largest:
        raise ResonantDenominator("eps0 is too close to +-J/2 for perturbation theory")
    dm = (p.delta1 - p.delta2) / (2 * np.sqrt(2))
    dp = (p.delta1 + p.delta2) / (2 * np.sqrt(2))
    xi, g1 = b.xi, b.gamma1
    return {
        ("e-", "e+"): g1 ** 2 * ((1 - xi) - 2 * (1 + xi) * dm * dp / (plus * minus)) ** 2,
        ("s0", "e-"): g1 ** 2 * ((1 - xi) * dp / minus + (1 + xi) * dm / plus) ** 2,
        ("e-", "s1"): g1 ** 2 * ((1 - xi) * dp / plus + (1 + xi) * dm / minus) ** 2,
        ("s0", "e+"): g1 ** 2 * ((1 + xi) * dp / minus + (1 - xi) * dm / plus) ** 2,
        ("e+", "s1"): g1 ** 2 * ((1 + xi) * dp / plus + (1 - xi) * dm / minus) ** 2,
    }


def zeroth_order_energies(p: ModelParams):
    return {"s0": -p.eps0, "e-": p.J / 2, "e+": -p.J / 2, "s1": p.eps0}


def fgr_rates_perturbative(p: ModelParams, b: BathParams):
    """Closed-form golden-rule rates between the labelled H0 eigenstates.

    Indices follow the energy ordering, so for J > 0 the roles of states 1 and 2
    are exchanged relative to J < 0.  The s0 <-> s1 pair has no leading-order
    element and is left at zero.
    """
    energy = zeroth_order_energies(p)
    order = sorted(LABELS, key=lambda name: energy[name])
    index = {name: k for k, name in enumerate(order)}
    rates = np.zeros((4, 4))
    for (x, y), m2 in perturbative_matrix_elements(p, b).items():
        for f, i in ((x, y), (y, x)):
            rates[index[f], index[i]] = RATE_PREFACTOR * thermal_weight(energy[f] - energy[i], b) * m2
    return RateTable(rates, rates[None], np.array([0]), "eigenstate")


def effective_rates(table: RateTable, sol: FloquetSolution, eig: EigenSystem):
    """Eigenstate rates dressed by the drive, sum_ab |<i|u_a>|^2 |<u_b|j>|^2 Gamma_ab."""
    w = np.abs(eig.states.conj().T @ sol.modes0) ** 2  # w[i, alpha]
    per = np.einsum("ia,nab,jb->nij", w, table.per_photon, w)
    return RateTable(per.sum(axis=0), per, table.photons, "effective")


def floquet_rate_table(sol: FloquetSolution, coupling, b: BathParams):
    """Convenience: Floquet rates straight from a solution."""
    a = transition_elements(sol, coupling)
    g = thermal_table(sol.quasienergies, photon_range(a), b, sol.omega)
    return floquet_rates(g, a)
