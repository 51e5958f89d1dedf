import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbsm_teleport import basis, states
from gbsm_teleport.basis import FAILURE, Kind, Success
from gbsm_teleport.errors import ContractError, DegenerateResourceError, LookupFixtureError
from gbsm_teleport.states import InfoState, Pauli

chis = st.floats(min_value=0.02, max_value=math.pi / 4)


def _gram(b):
    V = np.array(b.vectors)
    return V.conj() @ V.T


@settings(max_examples=50, deadline=None)
@given(chi=chis)
def test_matched_basis_orthonormal_and_two_successes(chi):
    b = basis.matched_basis(states.initial_family(chi), (1, 2))
    assert np.allclose(_gram(b), np.eye(4), atol=1e-12)
    assert b.n_success == 2


def test_primary_basis_at_pi6_by_hand():
    # cos|00> + sin|11>, sin|00> - cos|11>, ... with cos = sqrt3/2, sin = 1/2
    b = basis.matched_basis(states.initial_family(math.pi / 6), (1, 2))
    c, s = math.sqrt(3) / 2, 0.5
    expected = [
        np.array([c, 0, 0, s]),
        np.array([s, 0, 0, -c]),
        np.array([0, c, s, 0]),
        np.array([0, s, -c, 0]),
    ]
    for got, want in zip(b.vectors, expected):
        assert states.equal_up_to_phase(got, want)
    assert b.classification == (FAILURE, Success(Pauli.Z), Success(Pauli.X), FAILURE)


@pytest.mark.parametrize("tag", basis.FIXTURE_TAGS)
def test_fixtures_are_orthonormal(tag):
    b = basis.paper_fixture(tag, 0.5)
    assert np.allclose(_gram(b), np.eye(4), atol=1e-12)


def test_fixture_lookup_error():
    with pytest.raises(LookupFixtureError):
        basis.paper_fixture("after-7", 0.5)


def test_pair_basis_rejects_non_orthonormal():
    v = np.eye(4)
    with pytest.raises(ContractError):
        basis.PairBasis((1, 2), (v[0], v[0], v[2], v[3]), ("0", "1", "2", "3"), (FAILURE,) * 4)


def test_decompose_primary_sectors():
    d = basis.decompose(states.initial_family(0.3), (1, 2))
    assert set(d.carrier[i] for i in (0, 3)) == {"a", "b"}
    assert set(d.carrier[i] for i in (1, 2)) == {"a", "b"}


def test_matched_basis_zero_resource_is_degenerate():
    with pytest.raises(DegenerateResourceError):
        basis.matched_basis(states.initial_family(0.0), (1, 2))


@settings(max_examples=30, deadline=None)
@given(chi=chis, theta=st.floats(0.0, math.pi), phi=st.floats(-math.pi, math.pi))
def test_success_outcomes_deliver_info_exactly(chi, theta, phi):
    info = InfoState.from_bloch(theta, phi)
    fam = states.initial_family(chi)
    for label, vec, cls in basis.matched_basis(fam, (1, 2)):
        if not cls.success:
            continue
        child = states.apply_correction(states.project_pair(fam, (1, 2), vec), 3, cls.correction)
        assert states.fidelity_to_info(child, info, 3) == pytest.approx(1.0, abs=1e-12)
        assert basis.classify(states.project_pair(fam, (1, 2), vec), 3).success


def test_classify_residual():
    assert basis.classify_residual(np.array([1, 0]), np.array([0, -1])) == Success(Pauli.Z)
    assert basis.classify_residual(np.array([0, 1]), np.array([1, 0])) == Success(Pauli.X)
    assert basis.classify_residual(np.array([0.9, 0]), np.array([0, 0.1])).kind is Kind.FAILURE


def test_delivery_correction_aligns_a_component():
    assert basis.delivery_correction(np.array([0, 0.9]), np.array([-0.1, 0])) is Pauli.ZX
    assert basis.delivery_correction(np.array([0.9, 0]), np.array([0, 0.1])) is Pauli.I


def test_me_bell_basis_balanced_outcomes_succeed():
    # maximally entangled resource: every Bell outcome is exact
    fam = states.initial_family(math.pi / 4)
    b = basis.me_bell_basis(fam, (1, 2))
    assert b.n_success == 4
    b = basis.me_bell_basis(states.initial_family(0.3), (1, 2))
    assert b.n_success == 0
    assert all(c.correction is not None for c in b.classification)
