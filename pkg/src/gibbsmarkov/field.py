"""Sites, label alphabets, patterns, cliques and neighborhood systems.

Patterns are addressed by their lexicographic rank with site 0 the most
significant digit, so ``rank(0, 1) == 1`` and ``rank(1, 0) == 2`` on two
binary sites.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import GuardExceeded, MalformedSpec

#: Default cap on the number of patterns any single enumeration may produce.
GUARD_LIMIT = 2**24


@dataclass(frozen=True)
class FieldSpec:
    """A finite field: ``site_count`` sites with per-site alphabet sizes."""

    alphabet_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(a) for a in self.alphabet_sizes)
        if not sizes:
            raise MalformedSpec("site_count must be >= 1", "field")
        if any(a < 1 for a in sizes):
            raise MalformedSpec("every alphabet size must be >= 1", "field.alphabet_sizes")
        object.__setattr__(self, "alphabet_sizes", sizes)

    @classmethod
    def binary(cls, n: int) -> "FieldSpec":
        return cls((2,) * n)

    @property
    def site_count(self) -> int:
        return len(self.alphabet_sizes)

    @property
    def pattern_count(self) -> int:
        return int(np.prod(self.alphabet_sizes, dtype=object))

    @cached_property
    def strides(self) -> np.ndarray:
        """Rank weight of each site (site 0 most significant)."""
        strides = np.ones(self.site_count, dtype=np.int64)
        for l in range(self.site_count - 2, -1, -1):
            strides[l] = strides[l + 1] * self.alphabet_sizes[l + 1]
        return strides

    def check_guard(self, limit: int | None = None) -> None:
        limit = GUARD_LIMIT if limit is None else limit
        if self.pattern_count > limit:
            raise GuardExceeded(f"{self.pattern_count} patterns exceeds guard limit {limit}")

    def validate_pattern(self, x: Sequence[int], location: str = "pattern") -> tuple[int, ...]:
        x = tuple(int(v) for v in x)
        if len(x) != self.site_count:
            raise MalformedSpec(f"expected {self.site_count} labels, got {len(x)}", location)
        for l, (v, a) in enumerate(zip(x, self.alphabet_sizes)):
            if not 0 <= v < a:
                raise MalformedSpec(f"label {v} out of range at site {l}", location)
        return x

    def rank(self, patterns) -> np.ndarray | int:
        """Lexicographic rank of one pattern or of each row of a 2-d array."""
        arr = np.asarray(patterns, dtype=np.int64)
        r = arr @ self.strides
        return int(r) if arr.ndim == 1 else r

    def unrank(self, ranks) -> np.ndarray:
        ranks = np.asarray(ranks, dtype=np.int64)
        return np.stack(np.unravel_index(ranks, self.alphabet_sizes), axis=-1).astype(np.int64)


def enumerate_patterns(spec: FieldSpec, limit: int | None = None) -> np.ndarray:
    """All patterns of ``spec`` as a ``(count, site_count)`` array in rank order."""
    spec.check_guard(limit)
    return spec.unrank(np.arange(spec.pattern_count))


def _as_clique(c: Iterable[int]) -> tuple[int, ...]:
    c = tuple(sorted(int(s) for s in c))
    if len(set(c)) != len(c):
        raise MalformedSpec(f"clique {c} repeats a site", "cliques")
    return c


@dataclass(frozen=True)
class CliqueSet:
    """A family of distinct site subsets; the empty subset is allowed."""

    cliques: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cliques = tuple(_as_clique(c) for c in self.cliques)
        if len(set(cliques)) != len(cliques):
            raise MalformedSpec("duplicate clique", "cliques")
        object.__setattr__(self, "cliques", cliques)

    def __iter__(self):
        return iter(self.cliques)

    def __len__(self):
        return len(self.cliques)

    def __contains__(self, c):
        return _as_clique(c) in self.cliques

    def validate(self, spec: FieldSpec) -> "CliqueSet":
        for c in self.cliques:
            if any(s >= spec.site_count or s < 0 for s in c):
                raise MalformedSpec(f"clique {c} has a site out of range", "cliques")
        return self

    def union(self, other: Iterable[Iterable[int]]) -> "CliqueSet":
        seen = list(self.cliques)
        for c in other:
            c = _as_clique(c)
            if c not in seen:
                seen.append(c)
        return CliqueSet(tuple(seen))


@dataclass(frozen=True)
class NeighborhoodSystem:
    """Per-site neighbor sets; symmetric and irreflexive."""

    neighbors: tuple[frozenset[int], ...]

    def __post_init__(self):
        nbrs = tuple(frozenset(int(m) for m in eta) for eta in self.neighbors)
        n = len(nbrs)
        for l, eta in enumerate(nbrs):
            if l in eta:
                raise MalformedSpec(f"site {l} listed as its own neighbor", "neighborhood")
            for m in eta:
                if not 0 <= m < n:
                    raise MalformedSpec(f"neighbor {m} of site {l} out of range", "neighborhood")
                if l not in nbrs[m]:
                    raise MalformedSpec(f"asymmetric: {m} in eta_{l} but {l} not in eta_{m}", "neighborhood")
        object.__setattr__(self, "neighbors", nbrs)

    @classmethod
    def complete(cls, n: int) -> "NeighborhoodSystem":
        """Every site neighbors every other site."""
        return cls(tuple(frozenset(range(n)) - {l} for l in range(n)))

    def __getitem__(self, l: int) -> frozenset[int]:
        return self.neighbors[l]

    def __len__(self):
        return len(self.neighbors)

    def sorted(self, l: int) -> tuple[int, ...]:
        return tuple(sorted(self.neighbors[l]))


def cliques_containing(q: CliqueSet, l: int) -> CliqueSet:
    """The members of ``q`` that contain site ``l``."""
    if l < 0:
        raise IndexError(l)
    return CliqueSet(tuple(c for c in q if l in c))


def neighborhood_from_cliques(q: CliqueSet, site_count: int) -> NeighborhoodSystem:
    """Neighbors of ``l`` are the other sites sharing some clique with it."""
    nbrs = [set() for _ in range(site_count)]
    for c in q:
        for l in c:
            if l >= site_count:
                raise IndexError(f"clique {c} has site {l} >= {site_count}")
            nbrs[l].update(c)
    for l in range(site_count):
        nbrs[l].discard(l)
    return NeighborhoodSystem(tuple(frozenset(s) for s in nbrs))
