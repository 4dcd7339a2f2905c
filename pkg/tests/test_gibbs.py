import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbsmarkov import (
    AllowList,
    BoundaryNotExtendable,
    ConstraintSet,
    DenyList,
    EnergyTable,
    FieldSpec,
    GibbsSpec,
    JointDistribution,
    MalformedSpec,
    PotentialTable,
    energies,
    energy,
    energy_from_joint,
    joint_from_energy,
    local_conditional_from_grf,
    no_adjacent,
    probability_of_constraint,
    support,
)
from gibbsmarkov.checker import gibbs_joint
from gibbsmarkov.gibbs import pairwise_chain

from oracles import (
    all_patterns,
    as_array,
    brute_conditional,
    brute_joint,
    gibbs_energy_fn,
    no_adjacent_ones,
    python_admissible,
    random_constraints,
    random_gibbs,
)

SPEC3 = FieldSpec.binary(3)
CHAIN3 = pairwise_chain(SPEC3)


def test_energy_examples():
    spec2 = FieldSpec.binary(2)
    g = GibbsSpec(spec2, (PotentialTable.from_function(spec2, (0, 1), lambda a, b: a * b),))
    assert energy(g, (1, 1)) == 1.0
    assert energy(CHAIN3, (1, 1, 1)) == 2.0
    empty = GibbsSpec(SPEC3, ())
    assert all(energy(empty, x) == 0.0 for x in all_patterns((2, 2, 2)))


def test_incomplete_table_rejected():
    with pytest.raises(MalformedSpec):
        GibbsSpec(SPEC3, (PotentialTable((0, 1), np.zeros((2, 3))),))
    with pytest.raises(MalformedSpec):
        PotentialTable((1, 0), np.zeros((2, 2)))


def test_empty_clique_potential():
    g = GibbsSpec(SPEC3, (PotentialTable((), np.array(2.5)),))
    assert energies(g).tolist() == [2.5] * 8


def test_joint_from_constant_energy():
    s = support(SPEC3, no_adjacent(SPEC3))
    d, log_k = joint_from_energy(SPEC3, EnergyTable(s, np.zeros(5)), no_adjacent(SPEC3))
    assert np.allclose(d.probs, 0.2, rtol=0, atol=1e-15)
    assert log_k == pytest.approx(-math.log(5), abs=1e-15)


def test_joint_two_patterns():
    spec = FieldSpec((2,))
    d, _ = joint_from_energy(spec, EnergyTable(support(spec), [0.0, math.log(2)]))
    assert np.allclose(d.probs, [2 / 3, 1 / 3], rtol=0, atol=1e-15)


def test_chain_joint_matches_enumeration():
    d, log_k = gibbs_joint(CHAIN3)
    oracle = brute_joint(lambda x: x[0] * x[1] + x[1] * x[2], (2, 2, 2))
    assert np.abs(d.probs - as_array(oracle, d.support)).max() <= 1e-15
    z = 5 + 2 * math.exp(-1) + math.exp(-2)
    assert d.prob((1, 1, 1)) == pytest.approx(math.exp(-2) / z, rel=1e-14)
    assert log_k == pytest.approx(-math.log(z), rel=1e-14)


def test_joint_needs_energy_on_support():
    s = support(SPEC3, ConstraintSet((AllowList(((0, 0, 0),)),)))
    with pytest.raises(MalformedSpec):
        joint_from_energy(SPEC3, EnergyTable(s, [0.0]))


def test_probability_of_constraint_examples():
    full = JointDistribution.from_probs(support(SPEC3), np.full(8, 1 / 8))
    assert probability_of_constraint(full, no_adjacent(SPEC3)) == 5 / 8
    assert probability_of_constraint(full, ConstraintSet()) == 1.0
    assert probability_of_constraint(full, ConstraintSet((AllowList(((1, 0, 1),)),))) == pytest.approx(1 / 8, abs=1e-16)


def test_probability_of_constraint_matches_energy_sum():
    full, _ = gibbs_joint(CHAIN3)
    oracle = brute_joint(lambda x: x[0] * x[1] + x[1] * x[2], (2, 2, 2))
    expected = math.fsum(p for x, p in oracle.items() if no_adjacent_ones(x))
    assert probability_of_constraint(full, no_adjacent(SPEC3)) == pytest.approx(expected, abs=1e-15)


def test_local_conditional_examples():
    p = local_conditional_from_grf(CHAIN3, ConstraintSet(), 1, [1, None, 1])
    assert p[1] == pytest.approx(math.exp(-2) / (1 + math.exp(-2)), abs=1e-15)
    assert round(p[1], 5) == 0.1192
    flat = GibbsSpec(SPEC3, ())
    assert local_conditional_from_grf(flat, ConstraintSet(), 0, [None, 0, 0]).tolist() == [0.5, 0.5]
    assert local_conditional_from_grf(CHAIN3, no_adjacent(SPEC3), 1, [1, None, 0]).tolist() == [1.0, 0.0]


def test_boundary_not_extendable():
    cs = ConstraintSet((DenyList(((0, 0, 0), (0, 1, 0))),))
    with pytest.raises(BoundaryNotExtendable):
        local_conditional_from_grf(CHAIN3, cs, 1, [0, None, 0])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_localization_matches_full_conditional(seed, n):
    rng = np.random.default_rng(seed)
    g = random_gibbs(rng, n)
    cs = random_constraints(rng, g.spec, connected=False, min_size=1)
    ok = python_admissible(cs)
    oracle = brute_joint(gibbs_energy_fn(g), (2,) * n, ok)
    for x in oracle:
        for l in range(n):
            local = local_conditional_from_grf(g, cs, l, x)
            assert np.abs(local - brute_conditional(oracle, l, x, 2)).max() <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_flip_ratio_equals_conditional_ratio(seed, n):
    rng = np.random.default_rng(seed)
    g = random_gibbs(rng, n)
    cs = random_constraints(rng, g.spec, connected=False, min_size=1)
    d, _ = gibbs_joint(g, cs)
    for i, j, l in d.support.graph.edges.tolist():
        x, y = d.support.patterns[i], d.support.patterns[j]
        cond = local_conditional_from_grf(g, cs, l, x)
        joint_ratio = math.exp(d.log_probs[j] - d.log_probs[i])
        assert joint_ratio == pytest.approx(cond[y[l]] / cond[x[l]], rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_energy_round_trip_up_to_gauge(seed, n):
    rng = np.random.default_rng(seed)
    g = random_gibbs(rng, n)
    cs = random_constraints(rng, g.spec, connected=False, min_size=1)
    d, _ = gibbs_joint(g, cs)
    u = energies(g, d.support)
    back = energy_from_joint(d).energies
    assert np.abs((back - back[0]) - (u - u[0])).max() <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_constraint_mass_and_complement_sum_to_one(seed, n):
    rng = np.random.default_rng(seed)
    g = random_gibbs(rng, n)
    cs = random_constraints(rng, g.spec, connected=False, min_size=1)
    full, _ = gibbs_joint(g)
    inside = support(g.spec, cs)
    complement = ConstraintSet((DenyList(tuple(inside.members())),))
    total = probability_of_constraint(full, cs) + probability_of_constraint(full, complement)
    assert abs(total - 1.0) <= 1e-12
