"""Independent brute-force references and random trial generators for the tests.

Nothing here calls the package's numerical routines: joints, conditionals
and potentials are computed with ``itertools`` and ``math`` directly.
"""
import itertools
import math

import numpy as np

from gibbsmarkov import (
    ConstraintSet,
    CountConstraint,
    DenyList,
    FieldSpec,
    ForbiddenWindow,
    GibbsSpec,
    PotentialTable,
    support,
)


def all_patterns(sizes):
    return list(itertools.product(*(range(a) for a in sizes)))


def no_adjacent_ones(x):
    return all(not (a == 1 and b == 1) for a, b in zip(x, x[1:]))


def brute_joint(energy_fn, sizes, admissible=lambda x: True):
    """{pattern: P(pattern | C)} with P proportional to exp(-U)."""
    pats = [x for x in all_patterns(sizes) if admissible(x)]
    w = {x: math.exp(-energy_fn(x)) for x in pats}
    z = math.fsum(w.values())
    return {x: v / z for x, v in w.items()}


def brute_conditional(joint, l, x, alphabet):
    """P(x_l = v | all other sites of x) from a {pattern: prob} joint."""
    masses = []
    for v in range(alphabet):
        y = tuple(x[:l]) + (v,) + tuple(x[l + 1 :])
        masses.append(joint.get(y, 0.0))
    total = math.fsum(masses)
    return [m / total for m in masses]


def gibbs_energy_fn(g: GibbsSpec):
    def u(x):
        return math.fsum(float(t.values[tuple(x[s] for s in t.clique)]) for t in g.potentials)

    return u


def mobius_oracle(energy_fn, sizes, reference, clique, x):
    """Literal inclusion-exclusion sum for the canonical potential V_c(x)."""
    n = len(sizes)
    total = 0.0
    for k in range(len(clique) + 1):
        for b in itertools.combinations(clique, k):
            y = tuple(x[l] if l in b else reference[l] for l in range(n))
            total += (-1) ** (len(clique) - k) * energy_fn(y)
    return total


def random_gibbs(rng, n, max_order=3, low=-2.0, high=2.0, clique_count=None):
    spec = FieldSpec.binary(n)
    possible = sum(math.comb(n, k) for k in range(1, min(max_order, n) + 1))
    if clique_count is None:
        clique_count = int(rng.integers(1, 2 * n + 1))
    clique_count = min(clique_count, possible)
    cliques = set()
    while len(cliques) < clique_count:
        k = int(rng.integers(1, min(max_order, n) + 1))
        cliques.add(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
    tables = tuple(
        PotentialTable(c, rng.uniform(low, high, size=(2,) * len(c))) for c in sorted(cliques)
    )
    return GibbsSpec(spec, tables)


def random_constraints(rng, spec: FieldSpec, connected=True, min_size=2, tries=200):
    """Random windows (and sometimes a count/deny constraint) with a non-trivial support."""
    n = spec.site_count
    for _ in range(tries):
        parts = []
        for _ in range(int(rng.integers(0, n + 1))):
            k = int(rng.integers(2, min(3, n) + 1)) if n > 1 else 1
            sites = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
            labels = tuple(int(v) for v in rng.integers(0, 2, size=k))
            parts.append(ForbiddenWindow(sites, labels))
        if rng.random() < 0.25:
            parts.append(CountConstraint(1, "<=", int(rng.integers(1, n + 1))))
        if not connected and rng.random() < 0.25:
            deny = [tuple(int(v) for v in rng.integers(0, 2, size=n)) for _ in range(3)]
            parts.append(DenyList(tuple(deny)))
        cs = ConstraintSet(tuple(parts))
        try:
            s = support(spec, cs)
        except Exception:
            continue
        if len(s) < min_size:
            continue
        if connected and s.graph.component_count != 1:
            continue
        return cs
    raise RuntimeError("could not draw constraints")


def python_admissible(cs: ConstraintSet):
    """Pure-Python membership predicate mirroring the constraint kinds."""

    def ok(x):
        for c in cs:
            if isinstance(c, ForbiddenWindow):
                if c.sites and all(x[s] == v for s, v in zip(c.sites, c.forbidden_labels)):
                    return False
            elif isinstance(c, CountConstraint):
                count = sum(1 for v in x if v == c.label)
                if not {"=": count == c.bound, "<=": count <= c.bound, ">=": count >= c.bound}[c.comparator]:
                    return False
            elif isinstance(c, DenyList):
                if tuple(x) in c.patterns:
                    return False
            else:
                if tuple(x) not in c.patterns:
                    return False
        return True

    return ok


def as_array(joint_dict, s):
    return np.array([joint_dict[tuple(int(v) for v in p)] for p in s.patterns])
