import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbsm_teleport import states
from gbsm_teleport.errors import ContractError, DomainError, StructureError, UndefinedBranchError
from gbsm_teleport.states import InfoState, LinearFamilyState, Pauli

chis = st.floats(min_value=0.01, max_value=math.pi / 4)
angles = st.floats(min_value=0.0, max_value=math.pi)
phases = st.floats(min_value=-math.pi, max_value=math.pi)


def test_info_state_rejects_unnormalized():
    with pytest.raises(ContractError):
        InfoState(1, 0.1)


def test_from_bloch_poles():
    assert InfoState.from_bloch(0.0).a == 1
    s = InfoState.from_bloch(math.pi, 0.0)
    assert abs(s.b - 1) < 1e-15 and abs(s.a) < 1e-15


def test_check_chi_domain():
    with pytest.raises(DomainError):
        states.check_chi(-0.1)
    with pytest.raises(DomainError):
        states.check_chi(1.0)


def test_pauli_matrices_read_only_and_zx_order():
    zx = Pauli.ZX.matrix
    assert np.allclose(zx, [[0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        zx[0, 0] = 2


def test_initial_family_layout():
    fam = states.initial_family(math.pi / 6)
    A = fam.A.ravel()
    assert A[0b000] == pytest.approx(math.sqrt(3) / 2)
    assert A[0b011] == pytest.approx(0.5)
    assert fam.B.ravel()[0b111] == pytest.approx(0.5)
    assert fam.supports_disjoint()
    assert fam.weights == pytest.approx((1.0, 1.0))


def test_family_arrays_are_read_only():
    fam = states.initial_family(0.3)
    with pytest.raises(ValueError):
        fam.A[0, 0, 0] = 0


@settings(max_examples=50, deadline=None)
@given(chi=chis, theta=angles, phi=phases)
def test_instantiate_is_linear(chi, theta, phi):
    fam = states.initial_family(chi)
    info = InfoState.from_bloch(theta, phi)
    psi = states.instantiate(fam, info)
    assert np.allclose(psi, info.a * fam.A.ravel() + info.b * fam.B.ravel())
    assert states.branch_probability(fam, info) == pytest.approx(1.0)


def test_project_pair_validates():
    fam = states.initial_family(0.3)
    with pytest.raises(ContractError):
        states.project_pair(fam, (1, 2), [1, 1, 0, 0])
    with pytest.raises(DomainError):
        states.project_pair(fam, (1, 1), [1, 0, 0, 0])
    with pytest.raises(DomainError):
        states.project_pair(fam, (0, 2), [1, 0, 0, 0])


@settings(max_examples=40, deadline=None)
@given(chi=chis, theta=angles, phi=phases)
def test_projection_completeness(chi, theta, phi):
    # any orthonormal basis on the pair resolves the identity
    fam = states.initial_family(chi)
    info = InfoState.from_bloch(theta, phi)
    q, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(4, 4)) + 0j)
    for pair in ((1, 2), (1, 3)):
        total = sum(states.branch_probability(states.project_pair(fam, pair, q[:, k]), info) for k in range(4))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_spectator_of():
    assert states.spectator_of((1, 2)) == 3
    assert states.spectator_of((3, 1)) == 2


def test_spectator_residual_of_bell_projection():
    # |Phi+> on (1,2) leaves (a cos|0> + b sin|1>)/sqrt2 on qubit 3
    chi = 0.4
    fam = states.initial_family(chi)
    v = np.array([1, 0, 0, 1]) / math.sqrt(2)
    rA, rB = states.spectator_residual(states.project_pair(fam, (1, 2), v), 3)
    ov = rA[0] / abs(rA[0])
    assert np.allclose(rA / ov, [math.cos(chi) / math.sqrt(2), 0])
    assert np.allclose(rB / ov, [0, math.sin(chi) / math.sqrt(2)])


def test_spectator_residual_rejects_unprojected_and_zero():
    fam = states.initial_family(0.3)
    with pytest.raises(StructureError):
        states.spectator_residual(fam, 3)
    zero = LinearFamilyState(np.zeros(8), np.zeros(8))
    with pytest.raises(UndefinedBranchError):
        states.spectator_residual(zero, 3)
    with pytest.raises(UndefinedBranchError):
        states.fidelity_to_info(zero, InfoState(1, 0), 3)


def test_apply_correction_on_spectator():
    fam = states.initial_family(0.3)
    flipped = states.apply_correction(fam, 3, Pauli.X)
    assert flipped.A.ravel()[0b001] == pytest.approx(math.cos(0.3))
    with pytest.raises(DomainError):
        states.apply_correction(fam, 4, Pauli.X)


def test_equal_up_to_phase():
    v = np.array([0.6, 0.8j])
    assert states.equal_up_to_phase(v, 3 * np.exp(0.7j) * v)
    assert not states.equal_up_to_phase(v, np.array([0.8, 0.6j]))
    with pytest.raises(UndefinedBranchError):
        states.phase_align(np.zeros(2))
