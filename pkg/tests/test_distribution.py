import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbsmarkov import (
    AllowList,
    ConstraintSet,
    EmptySupport,
    FieldSpec,
    JointDistribution,
    RatioTable,
    conditional_restrict,
    energy_from_joint,
    joint_from_energy,
    no_adjacent,
    probabilities_from_ratios,
    ratio,
    ratios_from_joint,
    support,
)


def flat_support(k):
    return support(FieldSpec((k,)))


def table(ratios, ref=0):
    s = flat_support(len(ratios))
    return RatioTable(s, ref, np.log(np.asarray(ratios, dtype=float)))


def test_uniform_ratios():
    assert np.allclose(probabilities_from_ratios(table([1, 1, 1, 1])).probs, 0.25, rtol=0, atol=1e-15)


def test_ratios_1_1_2_4():
    p = probabilities_from_ratios(table([1, 1, 2, 4])).probs
    assert np.allclose(p, [1 / 8, 1 / 8, 1 / 4, 1 / 2], rtol=0, atol=1e-15)


def test_single_outcome():
    assert probabilities_from_ratios(table([1])).probs.tolist() == [1.0]


def test_ratio_table_invariants():
    s = flat_support(2)
    with pytest.raises(ValueError):
        RatioTable(s, 0, [0.5, 0.0])
    with pytest.raises(ValueError):
        RatioTable(s, 0, [0.0, np.inf])


def test_joint_rejects_non_normalized():
    with pytest.raises(ValueError):
        JointDistribution(flat_support(2), np.log([0.5, 0.6]))
    with pytest.raises(ValueError):
        JointDistribution(flat_support(2), [0.0, -np.inf])


def test_conditional_restrict_uniform():
    spec = FieldSpec.binary(3)
    full = JointDistribution.from_probs(support(spec), np.full(8, 1 / 8))
    r = conditional_restrict(full, no_adjacent(spec))
    assert len(r) == 5
    assert np.allclose(r.probs, 0.2, rtol=0, atol=1e-15)
    same = conditional_restrict(full, ConstraintSet())
    assert np.array_equal(same.log_probs, full.log_probs)


def test_conditional_restrict_empty():
    full = JointDistribution.from_probs(support(FieldSpec.binary(2)), np.full(4, 0.25))
    with pytest.raises(EmptySupport):
        conditional_restrict(full, ConstraintSet((AllowList(()),)))


def test_ratio_examples():
    d = JointDistribution.from_probs(flat_support(4), [1 / 8, 1 / 8, 1 / 4, 1 / 2])
    assert ratio(d, 0, 3) == pytest.approx(4.0, rel=1e-15)
    assert ratio(d, 2, 2) == 1.0
    u = JointDistribution.from_probs(flat_support(5), np.full(5, 0.2))
    assert all(ratio(u, i, j) == 1.0 for i in range(5) for j in range(5))


def test_energy_examples():
    u = energy_from_joint(JointDistribution.from_probs(flat_support(5), np.full(5, 0.2)))
    assert np.array_equal(u.energies, np.zeros(5))
    u = energy_from_joint(JointDistribution.from_probs(flat_support(4), [1 / 8, 1 / 8, 1 / 4, 1 / 2]))
    assert np.allclose(u.energies, [0, 0, -math.log(2), -math.log(4)], rtol=0, atol=1e-15)
    assert energy_from_joint(JointDistribution.from_probs(flat_support(1), [1.0])).energies.tolist() == [0.0]


positive_weights = st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=64)


@settings(max_examples=100)
@given(positive_weights, st.data())
def test_round_trip_and_reference_independence(weights, data):
    s = flat_support(len(weights))
    d = JointDistribution.from_probs(s, weights)
    ref_a = data.draw(st.integers(0, len(weights) - 1))
    ref_b = data.draw(st.integers(0, len(weights) - 1))
    pa = probabilities_from_ratios(ratios_from_joint(d, ref_a)).probs
    pb = probabilities_from_ratios(ratios_from_joint(d, ref_b)).probs
    assert np.abs(pa - d.probs).max() <= 1e-12
    assert np.abs(pa - pb).max() <= 1e-12


@settings(max_examples=50)
@given(st.lists(st.floats(-5, 5), min_size=16, max_size=16), st.lists(st.integers(0, 15), min_size=1, max_size=10))
def test_ratio_invariance_under_restriction(log_w, keep):
    spec = FieldSpec.binary(4)
    full = JointDistribution.from_log_weights(support(spec), log_w)
    allowed = tuple(tuple(int(v) for v in spec.unrank(r)) for r in sorted(set(keep)))
    r = conditional_restrict(full, ConstraintSet((AllowList(allowed),)))
    for i, x in enumerate(r.support.members()):
        for j, y in enumerate(r.support.members()):
            a = ratio(r, i, j)
            b = ratio(full, full.support.index_of(x), full.support.index_of(y))
            assert abs(a - b) <= 1e-12 * b


@given(st.lists(st.floats(-20, 20), min_size=1, max_size=32))
def test_energy_round_trip(log_w):
    spec = FieldSpec((len(log_w),))
    d = JointDistribution.from_log_weights(support(spec), log_w)
    u = energy_from_joint(d)
    assert u.energies[0] == 0.0
    back, _ = joint_from_energy(spec, u)
    assert np.abs(back.probs - d.probs).max() <= 1e-12
