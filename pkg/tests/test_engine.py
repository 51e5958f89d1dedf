import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbsm_teleport import engine
from gbsm_teleport.basis import Kind
from gbsm_teleport.engine import AttemptPlan, Strategy
from gbsm_teleport.errors import DegenerateResourceError, DomainError
from gbsm_teleport.states import InfoState


def test_attempt_plan_cap():
    with pytest.raises(DomainError):
        AttemptPlan(11)
    assert AttemptPlan(2, "me-final").strategy is Strategy.ME_FINAL


def test_pairs_alternate():
    assert engine.pair_for_attempt(0) == ((1, 2), 3)
    assert engine.pair_for_attempt(1) == ((1, 3), 2)
    assert engine.pair_for_attempt(2) == ((1, 2), 3)


def test_primary_probabilities_at_pi6():
    # a = 1: P0 = cos^4 = 9/16, P1 = P2 = cos^2 sin^2 = 3/16, P3 = sin^4 = 1/16
    t = engine.enumerate_tree(math.pi / 6, InfoState(1, 0), AttemptPlan(1))
    probs = [r.path_probability for r in t.records[0]]
    assert probs == pytest.approx([9 / 16, 3 / 16, 3 / 16, 1 / 16], abs=1e-15)
    assert t.cumulative_success[0] == pytest.approx(3 / 8, abs=1e-15)
    assert t.cumulative_success[1] == pytest.approx(3 / 8 + 9 / 128 + 27 / 896, abs=1e-15)


def test_failure_fidelity_at_pi6(plus):
    # B0 delivers (3/4, 1/4)/norm: fidelity (1/2) / (10/16) = 0.8
    t = engine.enumerate_tree(math.pi / 6, plus, AttemptPlan(1))
    assert t.record((0,)).fidelity_after_correction == pytest.approx(0.8, abs=1e-14)


def test_path_after_primary_failure_at_pi4():
    t = engine.enumerate_tree(math.pi / 4, InfoState(0.6, 0.8), AttemptPlan(1))
    assert t.record((0, 2)).path_probability == pytest.approx(1 / 16, abs=1e-15)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_maximal_entanglement_cumulative(m):
    t = engine.enumerate_tree(math.pi / 4, InfoState(1, 0), AttemptPlan(m))
    assert t.cumulative_success[m] == pytest.approx(1 - 2.0 ** -(m + 1), abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(chi=st.floats(0.05, math.pi / 4), theta=st.floats(0.0, math.pi), phi=st.floats(-math.pi, math.pi))
def test_tree_invariants(chi, theta, phi):
    info = InfoState.from_bloch(theta, phi)
    t = engine.enumerate_tree(chi, info, AttemptPlan(3))
    assert sum(r.path_probability for r in t.leaves()) == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(t.cumulative_success) >= -1e-15)
    for level in t.records:
        for r in level:
            if r.classification.success:
                assert r.fidelity_after_correction == pytest.approx(1.0, abs=1e-12)
            if len(r.history) > 1:
                parent = t.record(r.history[:-1])
                assert r.path_probability == pytest.approx(parent.path_probability * r.conditional_probability, abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(chi=st.floats(0.05, math.pi / 4), phi1=st.floats(-math.pi, math.pi), phi2=st.floats(-math.pi, math.pi))
def test_probabilities_depend_on_populations_only(chi, phi1, phi2):
    a = InfoState.from_bloch(1.1, phi1)
    b = InfoState(a.a * complex(math.cos(phi2), math.sin(phi2)), a.b)
    ta = engine.enumerate_tree(chi, a, AttemptPlan(2))
    tb = engine.enumerate_tree(chi, b, AttemptPlan(2))
    assert np.allclose(ta.cumulative_success, tb.cumulative_success, atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(lo=st.floats(0.05, 0.7), hi=st.floats(0.05, math.pi / 4))
def test_success_monotone_in_chi(lo, hi):
    lo, hi = sorted((lo, hi))
    info = InfoState(0.6, 0.8)
    a = engine.enumerate_tree(lo, info, AttemptPlan(3)).cumulative_success
    b = engine.enumerate_tree(hi, info, AttemptPlan(3)).cumulative_success
    assert np.all(b >= a - 1e-12)


def test_success_counts_and_tree_sizes():
    t = engine.enumerate_tree(0.5, InfoState(1, 0), AttemptPlan(3))
    assert t.success_counts() == [2, 4, 8, 16]
    assert [len(level) for level in t.records] == [4, 8, 16, 32]
    assert all(r.classification.kind is Kind.TRUNCATED for r in t.records[3] if not r.classification.success)


def test_me_final_replaces_last_attempt():
    t = engine.enumerate_tree(0.5, InfoState(1, 0), AttemptPlan(1, Strategy.ME_FINAL))
    assert t.success_counts() == [2, 0]
    assert len(t.leaves()) == 2 + 8


def test_degenerate_inputs():
    with pytest.raises(DegenerateResourceError):
        engine.enumerate_tree(0.0, InfoState(1, 0), AttemptPlan(0))
    with pytest.raises(DegenerateResourceError):
        engine.enumerate_tree(0.05, InfoState(1, 0), AttemptPlan(5))
    t = engine.enumerate_tree(0.5, InfoState(1, 0), AttemptPlan(1))
    with pytest.raises(DomainError):
        engine.cumulative_success(t, 2)


def test_sample_run_reaches_a_leaf(rng, plus):
    run = engine.sample_run(0.5, plus, AttemptPlan(2), rng)
    assert 1 <= run.attempts_used <= 3
    assert np.linalg.norm(run.residual) == pytest.approx(1.0)


def test_monte_carlo_reproducible_and_worker_independent(plus):
    plan = AttemptPlan(2)
    a = engine.monte_carlo(0.5, plus, plan, 150_000, seed=9)
    b = engine.monte_carlo(0.5, plus, plan, 150_000, seed=9, workers=3)
    assert a.successes == b.successes
    assert np.array_equal(a.per_attempt, b.per_attempt)
    exact = engine.enumerate_tree(0.5, plus, plan).cumulative_success[-1]
    assert a.within(exact)


def test_monte_carlo_rejects_zero_trials(plus):
    with pytest.raises(DomainError):
        engine.monte_carlo(0.5, plus, AttemptPlan(1), 0, seed=1)
