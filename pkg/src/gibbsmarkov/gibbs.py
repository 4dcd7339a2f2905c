"""Gibbs fields: clique potentials, energies, normalized joints and local conditionals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constraints import ConstraintSet, Support, support
from .distribution import EnergyTable, JointDistribution
from .errors import BoundaryNotExtendable, MalformedSpec
from .field import CliqueSet, FieldSpec, enumerate_patterns


@dataclass(frozen=True, eq=False)
class PotentialTable:
    """Complete table of ``V_c`` over label assignments on ``clique``.

    ``values`` has one axis per clique site (sorted order); the empty
    clique holds a 0-d array.
    """

    clique: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        clique = tuple(int(s) for s in self.clique)
        if list(clique) != sorted(set(clique)):
            raise MalformedSpec(f"clique {clique} must list distinct sites in increasing order", "gibbs")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != len(clique):
            raise MalformedSpec(f"table for clique {list(clique)} has wrong rank", "gibbs")
        if not np.all(np.isfinite(values)):
            raise MalformedSpec(f"table for clique {list(clique)} has non-finite values", "gibbs")
        object.__setattr__(self, "clique", clique)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, spec: FieldSpec, clique: Sequence[int], fn) -> "PotentialTable":
        """Tabulate ``fn(*labels)`` over every assignment on ``clique``."""
        clique = tuple(sorted(clique))
        shape = tuple(spec.alphabet_sizes[s] for s in clique)
        values = np.empty(shape)
        for idx in np.ndindex(*shape):
            values[idx] = fn(*idx)
        return cls(clique, values)

    def evaluate(self, patterns: np.ndarray) -> np.ndarray:
        """``V_c`` of each row of a pattern array."""
        if not self.clique:
            return np.full(len(patterns), float(self.values))
        return self.values[tuple(patterns[:, s] for s in self.clique)]


@dataclass(frozen=True, eq=False)
class GibbsSpec:
    """A field together with one potential table per clique."""

    spec: FieldSpec
    potentials: tuple[PotentialTable, ...]

    def __post_init__(self):
        pots = tuple(self.potentials)
        object.__setattr__(self, "potentials", pots)
        CliqueSet(tuple(t.clique for t in pots)).validate(self.spec)
        for t in pots:
            shape = tuple(self.spec.alphabet_sizes[s] for s in t.clique)
            if t.values.shape != shape:
                raise MalformedSpec(f"table for clique {list(t.clique)} is incomplete: expected shape {shape}", "gibbs")

    @property
    def cliques(self) -> CliqueSet:
        return CliqueSet(tuple(t.clique for t in self.potentials))

    def local_potentials(self, l: int) -> list[PotentialTable]:
        """The tables whose clique contains site ``l``."""
        return [t for t in self.potentials if l in t.clique]


def pairwise_chain(spec: FieldSpec, fn=lambda a, b: a * b) -> GibbsSpec:
    """Chain of ``fn(x_l, x_{l+1})`` potentials."""
    return GibbsSpec(
        spec,
        tuple(PotentialTable.from_function(spec, (l, l + 1), fn) for l in range(spec.site_count - 1)),
    )


def energy(g: GibbsSpec, x: Sequence[int]) -> float:
    """``U(x) = sum_c V_c(x restricted to c)``."""
    x = np.asarray([g.spec.validate_pattern(x)])
    return float(energies(g, x)[0])


def energies(g: GibbsSpec, patterns: np.ndarray | Support | None = None) -> np.ndarray:
    """Energies of many patterns; defaults to every pattern of the field."""
    if patterns is None:
        patterns = enumerate_patterns(g.spec)
    elif isinstance(patterns, Support):
        patterns = patterns.patterns
    u = np.zeros(len(patterns))
    for t in g.potentials:
        u += t.evaluate(patterns)
    return u


def energy_table(g: GibbsSpec, s: Support | None = None) -> EnergyTable:
    s = support(g.spec) if s is None else s
    return EnergyTable(s, energies(g, s))


def joint_from_energy(spec: FieldSpec, u: EnergyTable, cs: ConstraintSet | None = None) -> tuple[JointDistribution, float]:
    """``P(X | C) = k exp(-U(X))`` on the support of ``cs``; returns the joint and ``ln k``.

    ``u`` must give an energy for every pattern satisfying ``cs``.
    """
    s = support(spec, cs)
    idx = u.support.indices_of_ranks(s.ranks)
    if np.any(idx < 0):
        missing = s.members()[int(np.flatnonzero(idx < 0)[0])]
        raise MalformedSpec(f"no energy for admissible pattern {list(missing)}", "energy")
    d = JointDistribution.from_log_weights(s, -u.energies[idx])
    return d, d.log_normalizer


def probability_of_constraint(full_joint: JointDistribution, cs: ConstraintSet) -> float:
    """``P(C)``: the mass ``full_joint`` places on patterns satisfying ``cs``.

    Uses max-shifted weights so that, e.g., a uniform joint gives an exact count ratio.
    """
    lp = full_joint.log_probs
    w = np.exp(lp - lp.max())
    inside = cs.validate(full_joint.support.spec).mask(full_joint.support.spec, full_joint.support.patterns)
    return float(w[inside].sum() / w.sum())


def local_conditional_from_grf(g: GibbsSpec, cs: ConstraintSet, l: int, boundary: Sequence[int | None]) -> np.ndarray:
    """Distribution of the label at site ``l`` given the labels elsewhere.

    Only potentials whose clique contains ``l`` are evaluated; labels that
    would violate ``cs`` get probability 0. ``boundary[l]`` is ignored.
    """
    base = [0 if v is None else int(v) for v in boundary]
    base[l] = 0
    g.spec.validate_pattern(base, "boundary")
    return local_conditionals_from_grf(g, cs, l, np.asarray([base]))[0]


def local_conditionals_from_grf(g: GibbsSpec, cs: ConstraintSet, l: int, boundaries: np.ndarray) -> np.ndarray:
    """Row-wise ``local_conditional_from_grf`` for a ``(m, n)`` array of boundaries."""
    spec = g.spec
    a = spec.alphabet_sizes[l]
    m = len(boundaries)
    candidates = np.repeat(np.asarray(boundaries, dtype=np.int64), a, axis=0)
    candidates[:, l] = np.tile(np.arange(a), m)
    admissible = cs.mask(spec, candidates).reshape(m, a)
    if not admissible.any(axis=1).all():
        bad = int(np.flatnonzero(~admissible.any(axis=1))[0])
        raise BoundaryNotExtendable(f"no label at site {l} completes boundary {boundaries[bad].tolist()}")
    local = np.zeros(m * a)
    for t in g.local_potentials(l):
        local += t.evaluate(candidates)
    logw = np.where(admissible, -local.reshape(m, a), -np.inf)
    w = np.exp(logw - logw.max(axis=1, keepdims=True))
    return w / w.sum(axis=1, keepdims=True)
