import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbsmarkov import (
    EnergyTable,
    FieldSpec,
    GuardExceeded,
    MalformedSpec,
    canonical_potentials,
    check_markovianity,
    energies,
    minimal_clique_set,
    neighborhood_from_cliques,
    no_adjacent,
    support,
)
from gibbsmarkov.checker import gibbs_joint
from gibbsmarkov.decomposition import prune

from oracles import all_patterns, mobius_oracle


def energy_of(spec, fn):
    s = support(spec)
    return EnergyTable(s, [fn(tuple(int(v) for v in p)) for p in s.patterns])


def table(g, clique):
    return next(t.values for t in g.potentials if t.clique == clique)


def test_product_example():
    spec = FieldSpec.binary(2)
    g = canonical_potentials(spec, energy_of(spec, lambda x: x[0] * x[1]))
    assert float(table(g, ())) == 0.0
    assert table(g, (0,)).tolist() == [0.0, 0.0]
    assert table(g, (1,)).tolist() == [0.0, 0.0]
    assert table(g, (0, 1)).tolist() == [[0.0, 0.0], [0.0, 1.0]]


def test_constant_energy():
    spec = FieldSpec.binary(3)
    g = canonical_potentials(spec, energy_of(spec, lambda x: 5.0))
    assert float(table(g, ())) == 5.0
    assert all(np.all(t.values == 0) for t in g.potentials if t.clique)
    assert list(minimal_clique_set(g)) == [()]
    zero = canonical_potentials(spec, energy_of(spec, lambda x: 0.0))
    assert list(minimal_clique_set(zero)) == []


def test_chain_minimal_set():
    spec = FieldSpec.binary(3)
    g = canonical_potentials(spec, energy_of(spec, lambda x: x[0] * x[1] + x[1] * x[2]))
    assert list(minimal_clique_set(g, 1e-12)) == [(0, 1), (1, 2)]
    assert [t.clique for t in prune(g).potentials] == [(0, 1), (1, 2)]


def test_refuses_partial_energy():
    spec = FieldSpec.binary(3)
    s = support(spec, no_adjacent(spec))
    with pytest.raises(MalformedSpec):
        canonical_potentials(spec, EnergyTable(s, np.zeros(len(s))))


def test_clique_guard():
    spec = FieldSpec.binary(3)
    with pytest.raises(GuardExceeded):
        canonical_potentials(spec, energy_of(spec, lambda x: 0.0), max_order=2)


def random_energy(rng, sizes):
    spec = FieldSpec(tuple(sizes))
    s = support(spec)
    return spec, EnergyTable(s, rng.normal(scale=2.0, size=len(s)))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), sizes=st.lists(st.integers(2, 3), min_size=1, max_size=5), data=st.data())
def test_matches_inclusion_exclusion(seed, sizes, data):
    rng = np.random.default_rng(seed)
    spec, u = random_energy(rng, sizes)
    ref = tuple(data.draw(st.integers(0, a - 1)) for a in sizes)
    g = canonical_potentials(spec, u, reference_labels=ref)
    lookup = dict(zip(map(tuple, u.support.patterns.tolist()), u.energies))
    fn = lookup.__getitem__
    for t in g.potentials:
        for ix in itertools.product(*(range(sizes[l]) for l in t.clique)):
            x = list(ref)
            for l, v in zip(t.clique, ix):
                x[l] = v
            assert t.values[ix] == pytest.approx(mobius_oracle(fn, sizes, ref, t.clique, x), abs=1e-10)
            # Canonical vanishing: exact zero whenever a clique site carries its reference label.
            if any(v == ref[l] for l, v in zip(t.clique, ix)):
                assert t.values[ix] == 0.0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
def test_additivity_and_idempotence(seed, n):
    rng = np.random.default_rng(seed)
    spec, u = random_energy(rng, [2] * n)
    g = canonical_potentials(spec, u)
    total = energies(g, u.support)
    assert np.abs(total - u.energies).max() <= 1e-10
    again = canonical_potentials(spec, EnergyTable(u.support, total))
    for a, b in zip(g.potentials, again.potentials):
        assert a.clique == b.clique
        assert np.abs(a.values - b.values).max() <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 7))
def test_minimal_neighborhood_is_markov(seed, n):
    rng = np.random.default_rng(seed)
    spec, u = random_energy(rng, [2] * n)
    # Sparsify: keep a random subset of the canonical potentials.
    g = prune(canonical_potentials(spec, u))
    keep = rng.random(len(g.potentials)) < 0.3
    sparse = type(g)(spec, tuple(t for t, k in zip(g.potentials, keep) if k))
    q = minimal_clique_set(sparse)
    d, _ = gibbs_joint(sparse)
    assert check_markovianity(d, neighborhood_from_cliques(q, n)).passed


def test_heterogeneous_alphabet_additivity():
    # Mixed alphabet sizes: the potentials still sum back to the energy everywhere.
    spec = FieldSpec((2, 3))
    u = energy_of(spec, lambda x: 0.5 * x[0] - x[1] ** 2 + x[0] * x[1])
    g = canonical_potentials(spec, u)
    for x in all_patterns((2, 3)):
        assert sum(float(t.values[tuple(x[l] for l in t.clique)]) for t in g.potentials) == pytest.approx(
            0.5 * x[0] - x[1] ** 2 + x[0] * x[1], abs=1e-12
        )
