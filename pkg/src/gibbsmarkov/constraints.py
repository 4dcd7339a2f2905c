"""Hard constraints, the constrained support, and the single-site flip graph."""
from __future__ import annotations

import operator
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EmptySupport, MalformedSpec
from .field import FieldSpec, enumerate_patterns

_COMPARATORS = {"=": operator.eq, "<=": operator.le, ">=": operator.ge}


@dataclass(frozen=True)
class ForbiddenWindow:
    """Rejects patterns carrying ``forbidden_labels`` on ``sites``."""

    sites: tuple[int, ...]
    forbidden_labels: tuple[int, ...]

    kind = "forbidden_window"

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        object.__setattr__(self, "forbidden_labels", tuple(int(v) for v in self.forbidden_labels))

    def validate(self, spec: FieldSpec) -> None:
        if len(self.sites) != len(self.forbidden_labels):
            raise MalformedSpec("sites and labels differ in length", "constraints.forbidden_window")
        if len(set(self.sites)) != len(self.sites):
            raise MalformedSpec("window sites must be distinct", "constraints.forbidden_window")
        for s, v in zip(self.sites, self.forbidden_labels):
            if not 0 <= s < spec.site_count:
                raise MalformedSpec(f"site {s} out of range", "constraints.forbidden_window")
            if not 0 <= v < spec.alphabet_sizes[s]:
                raise MalformedSpec(f"label {v} out of range at site {s}", "constraints.forbidden_window")

    def scope(self, spec: FieldSpec) -> tuple[int, ...]:
        return tuple(sorted(self.sites))

    def mask(self, spec: FieldSpec, patterns: np.ndarray) -> np.ndarray:
        if not self.sites:
            # An empty window matches every pattern.
            return np.zeros(len(patterns), dtype=bool)
        hit = patterns[:, list(self.sites)] == np.asarray(self.forbidden_labels)
        return ~hit.all(axis=1)


@dataclass(frozen=True)
class CountConstraint:
    """Requires ``count(label) <comparator> bound`` over all sites."""

    label: int
    comparator: str
    bound: int

    kind = "count"

    def validate(self, spec: FieldSpec) -> None:
        if self.comparator not in _COMPARATORS:
            raise MalformedSpec(f"comparator {self.comparator!r} not one of =, <=, >=", "constraints.count")
        if self.bound < 0 or self.label < 0:
            raise MalformedSpec("label and bound must be non-negative", "constraints.count")

    def scope(self, spec: FieldSpec) -> tuple[int, ...]:
        return tuple(range(spec.site_count))

    def mask(self, spec: FieldSpec, patterns: np.ndarray) -> np.ndarray:
        counts = (patterns == self.label).sum(axis=1)
        return _COMPARATORS[self.comparator](counts, self.bound)


@dataclass(frozen=True)
class AllowList:
    """Only the listed patterns are admissible."""

    patterns: tuple[tuple[int, ...], ...]

    kind = "allow_list"

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(tuple(int(v) for v in p) for p in self.patterns))

    def validate(self, spec: FieldSpec) -> None:
        for p in self.patterns:
            spec.validate_pattern(p, f"constraints.{self.kind}")

    def scope(self, spec: FieldSpec) -> tuple[int, ...]:
        return tuple(range(spec.site_count))

    def _listed(self, spec: FieldSpec, patterns: np.ndarray) -> np.ndarray:
        listed = np.array([spec.rank(p) for p in self.patterns], dtype=np.int64)
        return np.isin(spec.rank(patterns), listed)

    def mask(self, spec: FieldSpec, patterns: np.ndarray) -> np.ndarray:
        return self._listed(spec, patterns)


@dataclass(frozen=True)
class DenyList(AllowList):
    """The listed patterns are inadmissible."""

    kind = "deny_list"

    def mask(self, spec: FieldSpec, patterns: np.ndarray) -> np.ndarray:
        return ~self._listed(spec, patterns)


Constraint = Union[ForbiddenWindow, CountConstraint, AllowList, DenyList]


@dataclass(frozen=True)
class ConstraintSet:
    """Conjunction of constraints; the empty set admits every pattern."""

    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def validate(self, spec: FieldSpec) -> "ConstraintSet":
        for c in self.constraints:
            c.validate(spec)
        return self

    def mask(self, spec: FieldSpec, patterns: np.ndarray) -> np.ndarray:
        patterns = np.asarray(patterns, dtype=np.int64)
        ok = np.ones(len(patterns), dtype=bool)
        for c in self.constraints:
            ok &= c.mask(spec, patterns)
        return ok

    def scopes(self, spec: FieldSpec) -> list[tuple[int, ...]]:
        """Site sets each constraint depends on (global kinds span every site)."""
        return [c.scope(spec) for c in self.constraints]


def no_adjacent(spec: FieldSpec, label: int = 1) -> ConstraintSet:
    """Forbid ``label`` on every pair of consecutive sites (hard-core chain)."""
    return ConstraintSet(
        tuple(ForbiddenWindow((l, l + 1), (label, label)) for l in range(spec.site_count - 1))
    )


def evaluate(cs: ConstraintSet, x: Sequence[int], spec: FieldSpec) -> bool:
    """Whether pattern ``x`` satisfies every constraint in ``cs``."""
    x = spec.validate_pattern(x)
    return bool(cs.mask(spec, np.asarray([x]))[0])


def intersect(a: ConstraintSet, b: ConstraintSet) -> ConstraintSet:
    return ConstraintSet(a.constraints + b.constraints)


@dataclass(frozen=True, eq=False)
class Support:
    """The satisfying patterns of a constraint set, in rank order."""

    spec: FieldSpec
    constraints: ConstraintSet
    patterns: np.ndarray
    ranks: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.ranks)

    @property
    def is_full(self) -> bool:
        """True when the support is all of the sample space."""
        return len(self.ranks) == self.spec.pattern_count

    def index_of(self, x) -> int:
        """Support index of pattern ``x``; raises ``KeyError`` if absent."""
        r = self.spec.rank(np.asarray(x, dtype=np.int64))
        i = int(np.searchsorted(self.ranks, r))
        if i >= len(self.ranks) or self.ranks[i] != r:
            raise KeyError(tuple(int(v) for v in x))
        return i

    def indices_of_ranks(self, ranks) -> np.ndarray:
        """Support index per rank, ``-1`` where the rank is not a member."""
        ranks = np.asarray(ranks, dtype=np.int64)
        idx = np.searchsorted(self.ranks, ranks)
        idx = np.minimum(idx, len(self.ranks) - 1)
        return np.where(self.ranks[idx] == ranks, idx, -1)

    def members(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in p) for p in self.patterns]

    @cached_property
    def graph(self) -> "FlipGraph":
        return flip_graph(self)


def support(spec: FieldSpec, cs: ConstraintSet | None = None, limit: int | None = None) -> Support:
    """Enumerate the patterns satisfying ``cs``; raises ``EmptySupport`` if none do."""
    cs = ConstraintSet() if cs is None else cs.validate(spec)
    patterns = enumerate_patterns(spec, limit)
    keep = cs.mask(spec, patterns)
    if not keep.any():
        raise EmptySupport("no pattern satisfies the constraint set")
    patterns = patterns[keep]
    return Support(spec, cs, patterns, spec.rank(patterns))


def restrict_support(s: Support, cs: ConstraintSet) -> tuple[Support, np.ndarray]:
    """Members of ``s`` that also satisfy ``cs``, plus their indices in ``s``."""
    cs.validate(s.spec)
    keep = np.flatnonzero(cs.mask(s.spec, s.patterns))
    if len(keep) == 0:
        raise EmptySupport("no support pattern satisfies the constraint set")
    sub = Support(s.spec, intersect(s.constraints, cs), s.patterns[keep], s.ranks[keep])
    return sub, keep


@dataclass(frozen=True, eq=False)
class FlipGraph:
    """Support patterns joined when they differ at exactly one site.

    ``edges`` rows are ``(i, j, site)`` with ``i < j``; components are
    numbered in order of their smallest member.
    """

    node_count: int
    edges: np.ndarray
    component_ids: np.ndarray

    @property
    def component_count(self) -> int:
        return int(self.component_ids.max()) + 1 if self.node_count else 0

    def components(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.component_ids == k) for k in range(self.component_count)]

    def adjacency(self):
        n = self.node_count
        i, j = self.edges[:, 0], self.edges[:, 1]
        return coo_matrix((np.ones(len(i)), (i, j)), shape=(n, n)).tocsr()


def flip_graph(s: Support) -> FlipGraph:
    spec = s.spec
    found = []
    for l in range(spec.site_count):
        col = s.patterns[:, l]
        for v in range(spec.alphabet_sizes[l]):
            src = np.flatnonzero(col < v)
            if len(src) == 0:
                continue
            dst = s.indices_of_ranks(s.ranks[src] + (v - col[src]) * spec.strides[l])
            hit = dst >= 0
            found.append(np.column_stack([src[hit], dst[hit], np.full(hit.sum(), l)]))
    edges = np.concatenate(found) if found else np.empty((0, 3), dtype=np.int64)
    edges = edges.astype(np.int64).reshape(-1, 3)
    edges = edges[np.lexsort((edges[:, 2], edges[:, 1], edges[:, 0]))]
    n = len(s)
    adj = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    _, raw = connected_components(adj, directed=False)
    # Relabel so component k is the k-th one met scanning nodes by rank.
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    return FlipGraph(n, edges, relabel[raw].astype(np.int64))
