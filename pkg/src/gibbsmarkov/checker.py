"""Executable equivalence checks between Gibbs and Markov descriptions.

Each check returns a ``Report`` carrying the worst deviation found and a
witness locating it, so a failure can be inspected rather than just counted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSet, Support, support
from .decomposition import minimal_clique_set
from .distribution import EnergyTable, JointDistribution, conditional_restrict, energy_from_joint
from .errors import InconsistentConditionals, NonIdentifiable
from .field import NeighborhoodSystem, neighborhood_from_cliques
from .gibbs import GibbsSpec, energies, joint_from_energy, local_conditionals_from_grf
from .markov import (
    LocalConditionalTable,
    check_markovianity,
    joint_from_local_conditionals,
    local_conditionals_from_joint,
)

PASS, FAIL = "pass", "fail"


@dataclass
class Report:
    name: str
    passed: bool
    worst_deviation: float
    tol: float
    status: str = ""
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            self.status = PASS if self.passed else FAIL

    def render(self) -> str:
        lines = [f"{self.name}: {self.status.upper()} (worst deviation {self.worst_deviation:.12g}, tol {self.tol:.3g})"]
        for key, value in self.witness.items():
            lines.append(f"  witness.{key} = {value}")
        for key, value in self.details.items():
            lines.append(f"  {key} = {value}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "status": self.status,
            "worst_deviation": self.worst_deviation,
            "tol": self.tol,
            "witness": self.witness,
            "details": self.details,
        }


def interaction_neighborhood(g: GibbsSpec, cs: ConstraintSet) -> NeighborhoodSystem:
    """Neighborhoods induced by the non-zero potentials and by the constraint scopes.

    A constraint couples every site it reads, so its scope acts like a clique
    when deciding which labels are admissible at a site.
    """
    q = minimal_clique_set(g).union(cs.scopes(g.spec))
    return neighborhood_from_cliques(q, g.spec.site_count)


def gibbs_joint(g: GibbsSpec, cs: ConstraintSet | None = None) -> tuple[JointDistribution, float]:
    s = support(g.spec, cs)
    return joint_from_energy(g.spec, EnergyTable(s, energies(g, s)), cs)


def verify_grf_to_mrf(
    g: GibbsSpec,
    cs: ConstraintSet,
    tol: float = 1e-9,
    neighborhood: NeighborhoodSystem | None = None,
) -> Report:
    """A Gibbs field is Markov, and its conditionals need only the cliques through each site.

    Runs ``check_markovianity`` against ``neighborhood`` (default: the
    interaction neighborhood) and compares the clique-local conditional
    with brute-force conditioning of the joint on every realized boundary.
    """
    joint, _ = gibbs_joint(g, cs)
    eta = interaction_neighborhood(g, cs) if neighborhood is None else neighborhood
    markov = check_markovianity(joint, eta, tol)

    brute = local_conditionals_from_joint(joint)
    spec = g.spec
    local_worst, local_witness = 0.0, {}
    for l in range(spec.site_count):
        keys = [k for (site, k) in brute.entries if site == l]
        sites = brute.key_sites(l)
        boundaries = np.zeros((len(keys), spec.site_count), dtype=np.int64)
        boundaries[:, list(sites)] = np.asarray(keys, dtype=np.int64).reshape(len(keys), len(sites))
        local = local_conditionals_from_grf(g, cs, l, boundaries)
        exact = np.stack([brute.entries[(l, k)] for k in keys])
        dev = np.abs(local - exact).max(axis=1)
        r = int(dev.argmax())
        if dev[r] > local_worst:
            local_worst = float(dev[r])
            b: list = boundaries[r].tolist()
            b[l] = None
            local_witness = {"site": l, "boundary": b, "local": local[r].tolist(), "brute_force": exact[r].tolist()}

    worst = max(markov.worst_deviation, local_worst)
    if markov.worst_deviation >= local_worst:
        witness = {f"markov.{k}": v for k, v in markov.witness.items()}
    else:
        witness = {f"localization.{k}": v for k, v in local_witness.items()}
    return Report(
        "grf_to_mrf",
        worst <= tol,
        worst,
        tol,
        witness=witness,
        details={
            "neighborhoods": [sorted(eta[l]) for l in range(spec.site_count)],
            "markovianity_deviation": markov.worst_deviation,
            "localization_deviation": local_worst,
            "support_size": len(joint),
        },
    )


def verify_mrf_to_grf(
    t: LocalConditionalTable,
    s: Support,
    tol: float = 1e-9,
    expected: JointDistribution | None = None,
    component_masses=None,
) -> Report:
    """Local conditionals determine a Gibbs joint ``k exp(-U)`` on the support.

    The reconstructed joint is turned into an energy and back, and its own
    conditionals are compared with the table. ``expected``, when given, is
    compared with the reconstruction as well.
    """
    try:
        joint = joint_from_local_conditionals(t, s, component_masses)
    except NonIdentifiable as e:
        return Report(
            "mrf_to_grf",
            False,
            float("nan"),
            tol,
            status="non_identifiable",
            details={"component_count": e.component_count, "components": e.components},
        )
    except InconsistentConditionals as e:
        return Report(
            "mrf_to_grf",
            False,
            e.residual,
            tol,
            status="inconsistent_conditionals",
            witness={"cycle": e.cycle, "cycle_patterns": [s.members()[i] for i in e.cycle]},
        )

    u = energy_from_joint(joint)
    regibbs, log_k = joint_from_energy(s.spec, u, s.constraints)
    gibbs_dev = float(np.abs(regibbs.probs - joint.probs).max())

    back = local_conditionals_from_joint(joint, t.neighborhood)
    table_dev = 0.0
    for key, row in back.entries.items():
        if key in t.entries:
            table_dev = max(table_dev, float(np.abs(t.entries[key] - row).max()))

    details = {"gibbs_form_deviation": gibbs_dev, "table_deviation": table_dev, "log_k": log_k, "k": float(np.exp(log_k))}
    worst = max(gibbs_dev, table_dev)
    if expected is not None:
        idx = expected.support.indices_of_ranks(s.ranks)
        expected_dev = float(np.abs(expected.probs[idx] - joint.probs).max())
        details["expected_deviation"] = expected_dev
        worst = max(worst, expected_dev)
    return Report("mrf_to_grf", worst <= tol, worst, tol, details=details)


def verify_ratio_invariance(full: JointDistribution, cs: ConstraintSet, tol: float = 1e-12) -> Report:
    """Conditioning on ``cs`` leaves every in-set probability ratio unchanged (relative ``tol``)."""
    restricted = conditional_restrict(full, cs)
    keep = np.flatnonzero(cs.mask(full.support.spec, full.support.patterns))
    lr = restricted.log_probs
    lf = full.log_probs[keep]
    worst, pair = 0.0, (0, 0)
    chunk = 512
    for start in range(0, len(lr), chunk):
        rows = slice(start, start + chunk)
        r_restricted = np.exp(lr[None, :] - lr[rows, None])
        r_full = np.exp(lf[None, :] - lf[rows, None])
        rel = np.abs(r_restricted - r_full) / r_full
        k = int(rel.argmax())
        if rel.flat[k] > worst:
            worst = float(rel.flat[k])
            i, j = np.unravel_index(k, rel.shape)
            pair = (start + int(i), int(j))
    members = restricted.support.members()
    return Report(
        "ratio_invariance",
        worst <= tol,
        worst,
        tol,
        witness={"pattern_i": members[pair[0]], "pattern_j": members[pair[1]]},
        details={"constrained_size": len(restricted), "full_size": len(full)},
    )


def verify_positivity_gibbs_form(d: JointDistribution, tol: float = 1e-12) -> Report:
    """Any strictly positive joint is ``k exp(-U)``; exhibits the ``U`` and ``k`` used."""
    u = energy_from_joint(d)
    back, log_k = joint_from_energy(d.support.spec, u, d.support.constraints)
    idx = back.support.indices_of_ranks(d.support.ranks)
    worst = float(np.abs(back.probs[idx] - d.probs).max())
    return Report(
        "positivity_gibbs_form",
        worst <= tol,
        worst,
        tol,
        details={"energies": u.energies.tolist(), "log_k": log_k, "k": float(np.exp(log_k))},
    )
