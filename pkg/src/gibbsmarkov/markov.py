"""Markov fields: single-site conditional tables and joint reconstruction from them.

Two support patterns that differ only at site ``l`` share the same boundary,
so the ratio of their joint probabilities equals the ratio of their
conditionals at ``l``. Chaining such ratios along a spanning tree of the
flip graph fixes the joint within each connected component.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse.csgraph import breadth_first_order
from scipy.special import logsumexp

from .constraints import ConstraintSet, Support
from .distribution import JointDistribution
from .errors import InconsistentConditionals, MalformedSpec, NonIdentifiable
from .field import FieldSpec, NeighborhoodSystem

#: Largest log-space cycle residual still attributed to rounding.
CYCLE_TOL = 1e-9
#: Tolerance on each conditional distribution summing to 1.
CONDITIONAL_SUM_TOL = 1e-12


def _key_sites(spec: FieldSpec, neighborhood: NeighborhoodSystem | None, l: int) -> tuple[int, ...]:
    if neighborhood is None:
        return tuple(m for m in range(spec.site_count) if m != l)
    return neighborhood.sorted(l)


@dataclass(frozen=True, eq=False)
class LocalConditionalTable:
    """Conditionals ``P(x_l = v | boundary, C)`` keyed by ``(l, boundary labels)``.

    With ``neighborhood=None`` the boundary is every other site in increasing
    order; otherwise it is the sorted neighbors of ``l``.
    """

    spec: FieldSpec
    constraints: ConstraintSet
    entries: Mapping[tuple[int, tuple[int, ...]], np.ndarray]
    neighborhood: NeighborhoodSystem | None = None

    def __post_init__(self):
        if self.neighborhood is not None and len(self.neighborhood) != self.spec.site_count:
            raise MalformedSpec("neighborhood size differs from site count", "conditionals.neighborhood")
        clean = {}
        for (l, key), probs in self.entries.items():
            l = int(l)
            key = tuple(int(v) for v in key)
            where = f"conditionals[site={l}, boundary={list(key)}]"
            if not 0 <= l < self.spec.site_count:
                raise MalformedSpec("site out of range", where)
            sites = self.key_sites(l)
            if len(key) != len(sites):
                raise MalformedSpec(f"boundary must give labels for sites {list(sites)}", where)
            for m, v in zip(sites, key):
                if not 0 <= v < self.spec.alphabet_sizes[m]:
                    raise MalformedSpec(f"label {v} out of range at site {m}", where)
            p = np.asarray(probs, dtype=float)
            if p.shape != (self.spec.alphabet_sizes[l],):
                raise MalformedSpec("one probability per label required", where)
            if np.any(p < 0) or not np.all(np.isfinite(p)):
                raise MalformedSpec("probabilities must be finite and non-negative", where)
            if abs(p.sum() - 1.0) > CONDITIONAL_SUM_TOL:
                raise MalformedSpec(f"probabilities sum to {p.sum()!r}", where)
            clean[(l, key)] = p
        object.__setattr__(self, "entries", clean)

    def key_sites(self, l: int) -> tuple[int, ...]:
        return _key_sites(self.spec, self.neighborhood, l)

    def key(self, l: int, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(x[m]) for m in self.key_sites(l))

    def conditional(self, l: int, x: Sequence[int]) -> np.ndarray:
        """Conditional at ``l`` for the boundary of pattern ``x``."""
        try:
            return self.entries[(l, self.key(l, x))]
        except KeyError:
            raise MalformedSpec(
                f"no entry for site {l}, boundary {list(self.key(l, x))}", "conditionals"
            ) from None

    def log_own_label(self, s: Support) -> np.ndarray:
        """``ln P(x_l | boundary)`` of each support pattern's own label, shape ``(|s|, n)``."""
        n = self.spec.site_count
        out = np.empty((len(s), n))
        for l in range(n):
            keys = s.patterns[:, list(self.key_sites(l))]
            uniq, inv = np.unique(keys, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            rows = np.stack([self.conditional(l, _expand(self, l, k)) for k in uniq])
            p = rows[inv, s.patterns[:, l]]
            if np.any(p <= 0):
                i = int(np.flatnonzero(p <= 0)[0])
                raise MalformedSpec(
                    f"zero conditional probability for support pattern {s.members()[i]} at site {l}",
                    "conditionals",
                )
            out[:, l] = np.log(p)
        return out


def _expand(t: LocalConditionalTable, l: int, key) -> list[int]:
    # Pattern with ``key`` placed on the key sites; other sites are irrelevant.
    x = [0] * t.spec.site_count
    for m, v in zip(t.key_sites(l), key):
        x[m] = int(v)
    return x


def _group_conditionals(d: JointDistribution, sites: Sequence[int], l: int):
    """Conditional of site ``l`` within groups of support patterns agreeing on ``sites``.

    Returns the distinct key rows, the ``(groups, labels)`` conditional
    matrix and each pattern's group index.
    """
    s = d.support
    w = np.exp(d.log_probs - d.log_probs.max())
    keys = s.patterns[:, list(sites)]
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    mass = np.zeros((len(uniq), s.spec.alphabet_sizes[l]))
    np.add.at(mass, (inv, s.patterns[:, l]), w)
    return uniq, mass / mass.sum(axis=1, keepdims=True), inv


def local_conditionals_from_joint(d: JointDistribution, eta: NeighborhoodSystem | None = None) -> LocalConditionalTable:
    """Exhaustively condition ``d`` on each site's boundary.

    ``eta=None`` conditions on all other sites; labels absent from the
    support receive probability 0.
    """
    spec = d.support.spec
    entries = {}
    for l in range(spec.site_count):
        sites = _key_sites(spec, eta, l)
        uniq, cond, _ = _group_conditionals(d, sites, l)
        for key, row in zip(uniq, cond):
            entries[(l, tuple(int(v) for v in key))] = row
    return LocalConditionalTable(spec, d.support.constraints, entries, eta)


@dataclass
class MarkovianityReport:
    passed: bool
    worst_deviation: float
    tol: float
    witness: dict = field(default_factory=dict)


def check_markovianity(d: JointDistribution, eta: NeighborhoodSystem, tol: float = 1e-12) -> MarkovianityReport:
    """Test that each full-boundary conditional depends only on the declared neighbors.

    Boundaries agreeing on ``eta[l]`` must give the same conditional at ``l``
    to within ``tol`` (max abs difference over labels).
    """
    spec = d.support.spec
    worst, witness = 0.0, {}
    for l in range(spec.site_count):
        others = _key_sites(spec, None, l)
        boundaries, cond, _ = _group_conditionals(d, others, l)
        nbr = [others.index(m) for m in eta.sorted(l)]
        _, group = np.unique(boundaries[:, nbr], axis=0, return_inverse=True)
        group = group.reshape(-1)
        order = np.argsort(group, kind="stable")
        starts = np.flatnonzero(np.r_[True, np.diff(group[order]) != 0])
        ranked = cond[order]
        spread = np.maximum.reduceat(ranked, starts, axis=0) - np.minimum.reduceat(ranked, starts, axis=0)
        per_group = spread.max(axis=1)
        gk = int(per_group.argmax())
        if per_group[gk] > worst:
            members = order[group[order] == group[order[starts[gk]]]]
            block = cond[members]
            v = int(spread[gk].argmax())
            hi, lo = members[block[:, v].argmax()], members[block[:, v].argmin()]
            worst = float(per_group[gk])
            witness = {
                "site": l,
                "label": v,
                "neighbors": list(eta.sorted(l)),
                "boundary_a": _boundary(boundaries[hi], others, l, spec),
                "boundary_b": _boundary(boundaries[lo], others, l, spec),
                "conditional_a": cond[hi].tolist(),
                "conditional_b": cond[lo].tolist(),
            }
    return MarkovianityReport(worst <= tol, worst, tol, witness)


def _boundary(row, others, l, spec) -> list[int | None]:
    x: list[int | None] = [None] * spec.site_count
    for m, v in zip(others, row):
        x[m] = int(v)
    return x


def _tree_path(pred: np.ndarray, i: int) -> list[int]:
    path = [i]
    while pred[path[-1]] >= 0:
        path.append(int(pred[path[-1]]))
    return path


def _witness_cycle(pred: np.ndarray, i: int, j: int) -> list[int]:
    up_i, up_j = _tree_path(pred, i), _tree_path(pred, j)
    on_j = set(up_j)
    lca = next(v for v in up_i if v in on_j)
    left = up_i[: up_i.index(lca) + 1]
    right = up_j[: up_j.index(lca)]
    return left + right[::-1] + [i]


def joint_from_local_conditionals(
    t: LocalConditionalTable,
    s: Support,
    component_masses: Sequence[float] | None = None,
    roots: Sequence[int] | None = None,
) -> JointDistribution:
    """Rebuild ``P(X | C)`` on ``s`` from single-site conditionals.

    Log-weights are propagated breadth-first from the smallest-rank node of
    each flip-graph component (or from ``roots``, one per component). Every
    flip edge is then checked for consistency.

    Raises ``InconsistentConditionals`` when some cycle residual exceeds
    ``CYCLE_TOL`` and ``NonIdentifiable`` when the flip graph has several
    components and ``component_masses`` is not given.
    """
    if t.spec != s.spec:
        raise MalformedSpec("conditional table and support use different fields", "conditionals")
    lc = t.log_own_label(s)
    g = s.graph
    comps = g.components()
    if roots is None:
        roots = [int(c[0]) for c in comps]
    if len(roots) != len(comps) or any(g.component_ids[r] != k for k, r in enumerate(roots)):
        raise ValueError("roots must name one node in each component, in component order")

    adj = g.adjacency()
    lw = np.zeros(len(s))
    pred = np.full(len(s), -1, dtype=np.int64)
    for root in roots:
        order, p = breadth_first_order(adj, int(root), directed=False, return_predecessors=True)
        for node in order[1:]:
            parent = p[node]
            site = int(np.flatnonzero(s.patterns[node] != s.patterns[parent])[0])
            lw[node] = lw[parent] + lc[node, site] - lc[parent, site]
            pred[node] = parent

    if len(g.edges):
        i, j, site = g.edges.T
        residual = np.abs((lw[j] - lw[i]) - (lc[j, site] - lc[i, site]))
        k = int(residual.argmax())
        if residual[k] > CYCLE_TOL:
            raise InconsistentConditionals(residual[k], _witness_cycle(pred, int(i[k]), int(j[k])))

    if len(comps) > 1:
        if component_masses is None:
            raise NonIdentifiable(comps)
        masses = np.asarray(component_masses, dtype=float)
        if masses.shape != (len(comps),) or np.any(masses <= 0):
            raise MalformedSpec(f"need {len(comps)} positive component masses", "component_masses")
        masses = masses / masses.sum()
        for c, m in zip(comps, masses):
            lw[c] += np.log(m) - logsumexp(lw[c])
    return JointDistribution.from_log_weights(s, lw)

