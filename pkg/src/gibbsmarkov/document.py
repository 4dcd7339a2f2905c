"""The JSON field-spec document: parsing, validation and serialization.

A document has ``format_version`` (currently 1), a ``field`` section, a
``constraints`` list and exactly one model section among ``gibbs``,
``energy``, ``conditionals`` and ``joint``::

    {
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "constraints": [{"kind": "forbidden_window", "sites": [0, 1], "labels": [1, 1]}],
      "gibbs": {"potentials": [{"clique": [0, 1],
                                "values": [{"labels": [0, 0], "value": 0.0}, ...]}]}
    }

``energy`` and ``joint`` list ``{"rank": r, "value": u}`` and
``{"rank": r, "p": p}`` records keyed by lexicographic pattern rank.
``conditionals`` lists ``{"site": l, "boundary": [...], "probs": [...]}``
where ``boundary`` has one entry per site, ``null`` at ``l`` and, when a
``neighborhood`` is declared, ``null`` at every non-neighbor as well.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .constraints import (
    AllowList,
    ConstraintSet,
    CountConstraint,
    DenyList,
    ForbiddenWindow,
    Support,
    support,
)
from .distribution import EnergyTable, JointDistribution
from .errors import MalformedSpec
from .field import FieldSpec, NeighborhoodSystem
from .gibbs import GibbsSpec, PotentialTable
from .markov import LocalConditionalTable

FORMAT_VERSION = 1
MODEL_SECTIONS = ("gibbs", "energy", "conditionals", "joint")
_COMPARATOR_ALIASES = {"=": "=", "==": "=", "<=": "<=", "≤": "<=", ">=": ">=", "≥": ">="}


@dataclass(eq=False)
class Model:
    """A validated document: field, constraints and one model section.

    ``energy`` and ``joint`` are stored over the patterns the document lists,
    which may be all of the sample space or only part of it.
    """

    spec: FieldSpec
    constraints: ConstraintSet
    kind: str
    gibbs: GibbsSpec | None = None
    energy: EnergyTable | None = None
    conditionals: LocalConditionalTable | None = None
    joint: JointDistribution | None = None

    def support(self) -> Support:
        return support(self.spec, self.constraints)

    @property
    def listed_is_full(self) -> bool:
        """Whether an explicit ``energy``/``joint`` section covers every pattern."""
        table = self.energy if self.kind == "energy" else self.joint
        return table is not None and table.support.is_full


def _require(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedSpec(f"missing key {key!r}", where)
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise MalformedSpec(f"{key!r} must be {kind.__name__ if isinstance(kind, type) else kind}", where)
    return value


def _listed_support(spec: FieldSpec, ranks: list[int], where: str) -> Support:
    ranks_arr = np.asarray(sorted(ranks), dtype=np.int64)
    if len(set(ranks)) != len(ranks):
        raise MalformedSpec("duplicate rank", where)
    if len(ranks_arr) == 0:
        raise MalformedSpec("no entries", where)
    if ranks_arr[0] < 0 or ranks_arr[-1] >= spec.pattern_count:
        raise MalformedSpec("rank out of range", where)
    if len(ranks_arr) == spec.pattern_count:
        return support(spec)
    patterns = spec.unrank(ranks_arr)
    listed = ConstraintSet((AllowList(tuple(map(tuple, patterns.tolist()))),))
    return Support(spec, listed, patterns, ranks_arr)


def _parse_constraint(rec, spec: FieldSpec, i: int):
    where = f"constraints[{i}]"
    kind = _require(rec, "kind", where, str)
    try:
        if kind == "forbidden_window":
            c = ForbiddenWindow(tuple(_require(rec, "sites", where, list)), tuple(_require(rec, "labels", where, list)))
        elif kind == "count":
            comparator = _COMPARATOR_ALIASES.get(_require(rec, "comparator", where, str))
            if comparator is None:
                raise MalformedSpec(f"unknown comparator {rec['comparator']!r}", where)
            c = CountConstraint(int(_require(rec, "label", where, int)), comparator, int(_require(rec, "bound", where, int)))
        elif kind in ("allow_list", "deny_list"):
            cls = AllowList if kind == "allow_list" else DenyList
            c = cls(tuple(tuple(p) for p in _require(rec, "patterns", where, list)))
        else:
            raise MalformedSpec(f"unknown constraint kind {kind!r}", where)
        c.validate(spec)
    except MalformedSpec as e:
        raise MalformedSpec(str(e), where) from None
    except (TypeError, ValueError) as e:
        raise MalformedSpec(str(e), where) from None
    return c


def _parse_gibbs(sec, spec: FieldSpec) -> GibbsSpec:
    tables = []
    for i, rec in enumerate(_require(sec, "potentials", "gibbs", list)):
        where = f"gibbs.potentials[{i}]"
        clique = tuple(int(s) for s in _require(rec, "clique", where, list))
        if list(clique) != sorted(set(clique)) or any(not 0 <= s < spec.site_count for s in clique):
            raise MalformedSpec(f"clique {list(clique)} must be increasing distinct in-range sites", where)
        shape = tuple(spec.alphabet_sizes[s] for s in clique)
        values = np.full(shape, np.nan)
        for entry in _require(rec, "values", where, list):
            labels = tuple(int(v) for v in _require(entry, "labels", where, list))
            if len(labels) != len(clique) or any(not 0 <= v < a for v, a in zip(labels, shape)):
                raise MalformedSpec(f"bad label assignment {list(labels)} for clique {list(clique)}", where)
            if not np.isnan(values[labels]):
                raise MalformedSpec(f"assignment {list(labels)} repeated for clique {list(clique)}", where)
            values[labels] = float(_require(entry, "value", where))
        if np.isnan(values).any():
            missing = [list(ix) for ix in np.ndindex(*shape) if np.isnan(values[ix])]
            raise MalformedSpec(f"potential table for clique {list(clique)} is missing assignments {missing}", where)
        tables.append(PotentialTable(clique, values))
    return GibbsSpec(spec, tuple(tables))


def _parse_ranked(sec, spec: FieldSpec, section: str, value_key: str):
    records = _require(sec, "values", section, list)
    ranks, values = [], []
    for i, rec in enumerate(records):
        where = f"{section}.values[{i}]"
        ranks.append(int(_require(rec, "rank", where, int)))
        values.append(float(_require(rec, value_key, where)))
    s = _listed_support(spec, ranks, section)
    order = np.argsort(ranks)
    return s, np.asarray(values, dtype=float)[order]


def _parse_conditionals(sec, spec: FieldSpec, cs: ConstraintSet) -> LocalConditionalTable:
    nb = sec.get("neighborhood") if isinstance(sec, dict) else None
    neighborhood = None
    if nb is not None:
        if not isinstance(nb, list) or len(nb) != spec.site_count:
            raise MalformedSpec("one neighbor list per site required", "conditionals.neighborhood")
        neighborhood = NeighborhoodSystem(tuple(frozenset(int(m) for m in eta) for eta in nb))
    entries = {}
    for i, rec in enumerate(_require(sec, "entries", "conditionals", list)):
        where = f"conditionals.entries[{i}]"
        l = int(_require(rec, "site", where, int))
        if not 0 <= l < spec.site_count:
            raise MalformedSpec(f"site {l} out of range", where)
        boundary = _require(rec, "boundary", where, list)
        if len(boundary) != spec.site_count:
            raise MalformedSpec("boundary must have one entry per site", where)
        expected = set(range(spec.site_count)) - {l} if neighborhood is None else neighborhood[l]
        given = {m for m, v in enumerate(boundary) if v is not None}
        if given != expected:
            raise MalformedSpec(f"boundary must specify exactly sites {sorted(expected)}", where)
        key = tuple(int(boundary[m]) for m in sorted(expected))
        if (l, key) in entries:
            raise MalformedSpec("duplicate entry", where)
        entries[(l, key)] = np.asarray(_require(rec, "probs", where, list), dtype=float)
    return LocalConditionalTable(spec, cs, entries, neighborhood)


def parse_document(doc: dict) -> Model:
    """Validate a decoded document into a ``Model``; raises ``MalformedSpec``."""
    if not isinstance(doc, dict):
        raise MalformedSpec("document must be a JSON object", "document")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise MalformedSpec(f"unsupported format_version {version!r}", "format_version")
    fld = _require(doc, "field", "document", dict)
    sizes = _require(fld, "alphabet_sizes", "field", list)
    n = int(fld.get("site_count", len(sizes)))
    if n != len(sizes):
        raise MalformedSpec("site_count disagrees with alphabet_sizes", "field")
    spec = FieldSpec(tuple(sizes))
    raw_cs = doc.get("constraints", [])
    if not isinstance(raw_cs, list):
        raise MalformedSpec("constraints must be a list", "constraints")
    cs = ConstraintSet(tuple(_parse_constraint(rec, spec, i) for i, rec in enumerate(raw_cs)))

    present = [k for k in MODEL_SECTIONS if k in doc]
    if len(present) != 1:
        raise MalformedSpec(f"exactly one model section of {list(MODEL_SECTIONS)} required, found {present}", "document")
    kind = present[0]
    sec = doc[kind]
    if kind == "gibbs":
        return Model(spec, cs, kind, gibbs=_parse_gibbs(sec, spec))
    if kind == "energy":
        s, u = _parse_ranked(sec, spec, "energy", "value")
        try:
            return Model(spec, cs, kind, energy=EnergyTable(s, u))
        except ValueError as e:
            raise MalformedSpec(str(e), "energy") from None
    if kind == "joint":
        s, p = _parse_ranked(sec, spec, "joint", "p")
        if np.any(p <= 0) or not np.all(np.isfinite(p)):
            raise MalformedSpec("probabilities must be positive and finite", "joint")
        return Model(spec, cs, kind, joint=JointDistribution.from_probs(s, p))
    return Model(spec, cs, kind, conditionals=_parse_conditionals(sec, spec, cs))


def parse_spec(text: str) -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedSpec(f"invalid JSON: {e}", "document") from None
    try:
        return parse_document(doc)
    except (TypeError, ValueError, AttributeError) as e:
        raise MalformedSpec(str(e), "document") from None


def load_spec(path) -> Model:
    return parse_spec(Path(path).read_text())


def _constraint_record(c) -> dict:
    if isinstance(c, ForbiddenWindow):
        return {"kind": c.kind, "sites": list(c.sites), "labels": list(c.forbidden_labels)}
    if isinstance(c, CountConstraint):
        return {"kind": c.kind, "label": c.label, "comparator": c.comparator, "bound": c.bound}
    return {"kind": c.kind, "patterns": [list(p) for p in c.patterns]}


def to_document(model: Model) -> dict:
    spec = model.spec
    doc = {
        "format_version": FORMAT_VERSION,
        "field": {"site_count": spec.site_count, "alphabet_sizes": list(spec.alphabet_sizes)},
        "constraints": [_constraint_record(c) for c in model.constraints],
    }
    if model.kind == "gibbs":
        doc["gibbs"] = {
            "potentials": [
                {
                    "clique": list(t.clique),
                    "values": [
                        {"labels": list(ix), "value": float(t.values[ix])}
                        for ix in product(*(range(a) for a in t.values.shape))
                    ],
                }
                for t in model.gibbs.potentials
            ]
        }
    elif model.kind == "energy":
        u = model.energy
        doc["energy"] = {"values": [{"rank": int(r), "value": float(v)} for r, v in zip(u.support.ranks, u.energies)]}
    elif model.kind == "joint":
        d = model.joint
        doc["joint"] = {"values": [{"rank": int(r), "p": float(p)} for r, p in zip(d.support.ranks, d.probs)]}
    else:
        t = model.conditionals
        entries = []
        for (l, key), probs in sorted(t.entries.items()):
            boundary: list = [None] * spec.site_count
            for m, v in zip(t.key_sites(l), key):
                boundary[m] = v
            entries.append({"site": l, "boundary": boundary, "probs": [float(p) for p in probs]})
        nb = None if t.neighborhood is None else [sorted(t.neighborhood[l]) for l in range(spec.site_count)]
        doc["conditionals"] = {"neighborhood": nb, "entries": entries}
    return doc


def serialize(model: Model) -> str:
    return json.dumps(to_document(model), indent=1)

