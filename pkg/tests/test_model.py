import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from floqent.errors import DegenerateSpectrum, ResonantDenominator
from floqent.model import (
    DRIVE_OP, LABELS, DriveParams, ModelParams, build_coupling_op, build_drive, build_h0,
    diagonalize_h0, perturbative_eigenstates,
)

energies = st.floats(-5, 5, allow_nan=False)
tunnelling = st.floats(0, 0.5, allow_nan=False)


@given(energies, tunnelling, tunnelling, energies)
def test_h0_matches_term_by_term_construction(eps0, d1, d2, J):
    h = build_h0(ModelParams(eps0=eps0, delta1=d1, delta2=d2, J=J))
    assert np.allclose(h, oracles.hamiltonian(eps0, d1, d2, J), atol=1e-14)
    assert np.allclose(h, h.conj().T)


def test_drive_is_diagonal_and_periodic():
    p, d = ModelParams(), DriveParams(amplitude=2.0)
    assert np.allclose(build_drive(p, d, 0.0), -2.0 * DRIVE_OP)
    assert np.allclose(build_drive(p, d, d.period), build_drive(p, d, 0.0))


def test_coupling_operator():
    a = build_coupling_op(1.0, 0.1)
    assert np.allclose(np.diag(a), [1.1, 0.9, -0.9, -1.1])
    with pytest.warns(UserWarning):
        build_coupling_op(1.0, 1.5)


@pytest.mark.parametrize("J, order", [(-2.5, ("s0", "e-", "e+", "s1")),
                                      (2.5, ("s0", "e+", "e-", "s1"))])
def test_label_ordering_follows_exchange_sign(J, order):
    eig = diagonalize_h0(ModelParams(J=J))
    assert eig.ordering() == order
    assert sorted(eig.labels) == sorted(LABELS)


def test_entangled_states_are_near_bell_states():
    eig = diagonalize_h0(ModelParams())
    minus = eig.state("e-")
    assert abs(np.vdot(np.array([0, -1, 1, 0]) / np.sqrt(2), minus)) ** 2 > 0.99
    assert oracles.concurrence_pure(minus) > 0.99
    assert oracles.concurrence_pure(eig.state("s0")) < 0.01


def test_zeroth_order_energies_when_tunnelling_off():
    eig = diagonalize_h0(ModelParams(eps0=3.0, delta1=0.0, delta2=0.0, J=-2.0))
    assert np.allclose(eig.energies, [-3.0, -1.0, 1.0, 3.0])
    assert eig.energies[eig.labels["e-"]] == pytest.approx(-1.0)


@given(st.floats(3.0, 5.0), st.floats(-2.5, -0.5))
def test_first_order_states_overlap_exact_ones(eps0, J):
    p = ModelParams(eps0=eps0, J=J)
    eig = diagonalize_h0(p)
    approx = perturbative_eigenstates(p)
    for name in LABELS:
        deficit = 1 - abs(np.vdot(approx[name], eig.state(name))) ** 2
        assert deficit < 1e-3


def test_first_order_overlap_is_second_order_small():
    # the deficit should scale like the square of the tunnelling amplitudes
    deficits = []
    for scale in (1.0, 0.5):
        p = ModelParams(delta1=0.1 * scale, delta2=0.15 * scale)
        eig = diagonalize_h0(p)
        approx = perturbative_eigenstates(p)
        deficits.append(max(1 - abs(np.vdot(approx[n], eig.state(n))) ** 2 for n in LABELS))
    assert deficits[1] < deficits[0] / 8


def test_perturbation_theory_rejects_resonance():
    with pytest.raises(ResonantDenominator):
        perturbative_eigenstates(ModelParams(eps0=1.25, J=-2.5))


def test_degenerate_spectrum_raises():
    with pytest.raises(DegenerateSpectrum):
        diagonalize_h0(ModelParams(eps0=0.0, delta1=0.0, delta2=0.0, J=0.0))


def test_parameter_validation():
    with pytest.raises(ValueError):
        ModelParams(delta1=-0.1)
    with pytest.raises(ValueError):
        DriveParams(amplitude=-1)
    p = ModelParams()
    assert p.eps_c == 1.25
    assert p.crossover_amplitude == pytest.approx(2.45)
