"""Canonical clique potentials of an arbitrary energy, by Moebius inversion.

For a reference labelling ``r`` and clique ``c``::

    V_c(x) = sum_{b subset of c} (-1)^{|c \\ b|} U(x on b, r elsewhere)

The inclusion-exclusion sum is evaluated as a product of per-site
difference operators: sites outside ``c`` are pinned to their reference
label, and each site inside ``c`` is replaced by ``f(x_l) - f(r_l)``. The
difference vanishes identically at ``x_l = r_l``, which gives the
canonical zero of every potential whose clique carries a reference label.
"""
from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .distribution import EnergyTable
from .errors import GuardExceeded, MalformedSpec
from .field import CliqueSet, FieldSpec
from .gibbs import GibbsSpec, PotentialTable

#: Largest field (in sites) whose full subset lattice will be decomposed.
GUARD_CLIQUE_ORDER = 20
MINIMAL_TOL = 1e-12


def all_cliques(n: int) -> list[tuple[int, ...]]:
    """Every subset of ``range(n)``, by size then lexicographically."""
    return [c for k in range(n + 1) for c in combinations(range(n), k)]


def canonical_potentials(
    spec: FieldSpec,
    u: EnergyTable,
    reference_labels: Sequence[int] | None = None,
    max_order: int | None = None,
) -> GibbsSpec:
    """Decompose a full-domain energy into canonical potentials over all cliques.

    ``u`` must cover every pattern of ``spec``; constrained energies are
    refused since an indicator of the constraint set has no finite
    potential form.
    """
    max_order = GUARD_CLIQUE_ORDER if max_order is None else max_order
    n = spec.site_count
    if n > max_order:
        raise GuardExceeded(f"decomposition of {n} sites exceeds clique guard {max_order}")
    spec.check_guard()
    if u.support.spec != spec or not u.support.is_full:
        raise MalformedSpec("decomposition needs an energy over every pattern of the field", "energy")
    ref = tuple(0 for _ in range(n)) if reference_labels is None else spec.validate_pattern(reference_labels, "reference_labels")

    # Full-support ranks are 0..N-1, so the energies reshape directly.
    tensor = u.energies.reshape(spec.alphabet_sizes)
    tables = []
    for c in all_cliques(n):
        index = tuple(slice(None) if l in c else ref[l] for l in range(n))
        v = np.array(tensor[index], dtype=float)
        for axis, l in enumerate(c):
            base = np.take(v, [ref[l]], axis=axis)
            v = v - base
        tables.append(PotentialTable(c, v))
    return GibbsSpec(spec, tuple(tables))


def minimal_clique_set(g: GibbsSpec, tol: float = MINIMAL_TOL) -> CliqueSet:
    """Cliques with some potential value above ``tol`` in magnitude, by size then sites."""
    keep = [t.clique for t in g.potentials if t.values.size and np.abs(t.values).max() > tol]
    return CliqueSet(tuple(sorted(keep, key=lambda c: (len(c), c))))


def prune(g: GibbsSpec, tol: float = MINIMAL_TOL) -> GibbsSpec:
    """Drop the potentials outside ``minimal_clique_set``."""
    keep = set(minimal_clique_set(g, tol))
    return GibbsSpec(g.spec, tuple(t for t in g.potentials if t.clique in keep))
