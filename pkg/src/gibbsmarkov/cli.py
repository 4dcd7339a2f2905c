"""Command-line interface.

Exit codes: 0 success, 1 a ``check`` report failed, 2 input error
(malformed document, empty support, unusable model), 3 guard exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import checker
from .constraints import ConstraintSet, support
from .decomposition import canonical_potentials, minimal_clique_set
from .distribution import EnergyTable, JointDistribution, conditional_restrict, energy_from_joint
from .document import Model, load_spec
from .errors import GibbsMarkovError, GuardExceeded, NonErgodicWarning
from .field import neighborhood_from_cliques
from .gibbs import GibbsSpec, joint_from_energy, probability_of_constraint
from .markov import joint_from_local_conditionals, local_conditionals_from_joint
from .sampler import exact_sample, gibbs_run

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


def fmt(v: float) -> str:
    return f"{v:.12g}"


@dataclass
class Resolved:
    """The constrained joint a model induces, plus what else it determines."""

    joint: JointDistribution
    log_k: float
    p_c: float | None = None
    full: JointDistribution | None = None


def resolve(model: Model) -> Resolved:
    spec, cs = model.spec, model.constraints
    if model.kind == "gibbs":
        joint, log_k = checker.gibbs_joint(model.gibbs, cs)
        full, _ = checker.gibbs_joint(model.gibbs, None)
        return Resolved(joint, log_k, probability_of_constraint(full, cs), full)
    if model.kind == "energy":
        joint, log_k = joint_from_energy(spec, model.energy, cs)
        if model.listed_is_full:
            full, _ = joint_from_energy(spec, model.energy, None)
            return Resolved(joint, log_k, probability_of_constraint(full, cs), full)
        return Resolved(joint, log_k)
    if model.kind == "joint":
        s = model.support()
        if np.any(model.joint.support.indices_of_ranks(s.ranks) < 0):
            raise GibbsMarkovError("joint section omits some pattern that satisfies the constraints")
        joint = conditional_restrict(model.joint, cs)
        full = model.joint if model.listed_is_full else None
        p_c = probability_of_constraint(full, cs) if full is not None else None
        return Resolved(joint, float(joint.log_probs[0]), p_c, full)
    joint = joint_from_local_conditionals(model.conditionals, model.support())
    return Resolved(joint, float(joint.log_probs[0]))


def model_gibbs(model: Model, res: Resolved) -> tuple[GibbsSpec, str]:
    """A Gibbs specification for the model and a note on where it came from."""
    if model.kind == "gibbs":
        return model.gibbs, "gibbs section"
    if res.full is not None:
        return canonical_potentials(model.spec, energy_from_joint(res.full)), "canonical potentials of the full joint"
    # Only P(X | C) is known: extend its energy by 0 outside C, which leaves
    # P(X | C) unchanged since the constraints are applied separately.
    omega = support(model.spec)
    u = np.zeros(len(omega))
    u[res.joint.support.ranks] = energy_from_joint(res.joint).energies
    return canonical_potentials(model.spec, EnergyTable(omega, u)), "canonical potentials of the zero-extended energy"


def run_checks(model: Model) -> list[checker.Report]:
    cs = model.constraints
    s = model.support()
    if model.kind == "conditionals":
        mrf = checker.verify_mrf_to_grf(model.conditionals, s)
        if not mrf.passed:
            skipped = [
                checker.Report(name, False, float("nan"), 0.0, status="skipped", details={"reason": "no joint: " + mrf.status})
                for name in ("grf_to_mrf", "ratio_invariance", "positivity_gibbs_form")
            ]
            return [skipped[0], mrf, *skipped[1:]]
    res = resolve(model)
    g, origin = model_gibbs(model, res)
    grf = checker.verify_grf_to_mrf(g, cs)
    grf.details["gibbs_origin"] = origin
    if model.kind != "conditionals":
        mrf = checker.verify_mrf_to_grf(local_conditionals_from_joint(res.joint), s, expected=res.joint)
    if res.full is not None:
        ratio = checker.verify_ratio_invariance(res.full, cs)
    else:
        ratio = checker.verify_ratio_invariance(res.joint, ConstraintSet())
        ratio.details["note"] = "no full-domain model; checked on the constrained joint alone"
    positivity = checker.verify_positivity_gibbs_form(res.joint)
    return [grf, mrf, ratio, positivity]


def _labels(p) -> list[int]:
    return [int(v) for v in p]


def _emit_table(header, rows, out):
    print("\t".join(header), file=out)
    for row in rows:
        print("\t".join(fmt(v) if isinstance(v, float) else str(v) for v in row), file=out)


def cmd_info(model: Model, args, out) -> int:
    s = model.support()
    info = {
        "site_count": model.spec.site_count,
        "alphabet_sizes": list(model.spec.alphabet_sizes),
        "omega_size": model.spec.pattern_count,
        "support_size": len(s),
        "flip_graph_edges": len(s.graph.edges),
        "flip_graph_components": s.graph.component_count,
        "constraint_count": len(model.constraints),
        "model": model.kind,
    }
    if args.format == "json":
        json.dump(info, out, indent=1)
        print(file=out)
    else:
        _emit_table(["key", "value"], [(k, " ".join(map(str, v)) if isinstance(v, list) else v) for k, v in info.items()], out)
    return EXIT_OK


def cmd_support(model: Model, args, out) -> int:
    s = model.support()
    if args.format == "json":
        json.dump({"ranks": s.ranks.tolist(), "patterns": s.patterns.tolist()}, out)
        print(file=out)
    else:
        n = model.spec.site_count
        _emit_table(["index", "rank", *(f"x{l}" for l in range(n))], [(i, int(r), *_labels(p)) for i, (r, p) in enumerate(zip(s.ranks, s.patterns))], out)
    return EXIT_OK


def cmd_joint(model: Model, args, out) -> int:
    res = resolve(model)
    d = res.joint
    if args.format == "json":
        json.dump(
            {
                "ranks": d.support.ranks.tolist(),
                "patterns": d.support.patterns.tolist(),
                "probabilities": d.probs.tolist(),
                "log_k": res.log_k,
                "p_constraint": res.p_c,
            },
            out,
        )
        print(file=out)
        return EXIT_OK
    n = model.spec.site_count
    _emit_table(
        ["rank", *(f"x{l}" for l in range(n)), "probability"],
        [(int(r), *_labels(p), float(q)) for r, p, q in zip(d.support.ranks, d.support.patterns, d.probs)],
        out,
    )
    print(f"# ln_k\t{fmt(res.log_k)}", file=out)
    if res.p_c is not None:
        print(f"# P(C)\t{fmt(res.p_c)}", file=out)
    return EXIT_OK


def cmd_decompose(model: Model, args, out) -> int:
    res = resolve(model)
    if res.full is None:
        raise GibbsMarkovError(
            "decomposition needs a model over the whole sample space; constraints are never turned into potentials"
        )
    g = canonical_potentials(model.spec, energy_from_joint(res.full))
    q = minimal_clique_set(g, args.tol)
    eta = neighborhood_from_cliques(q, model.spec.site_count)
    kept = [t for t in g.potentials if t.clique in set(q)]
    if args.format == "json":
        json.dump(
            {
                "potentials": [{"clique": list(t.clique), "values": t.values.tolist()} for t in kept],
                "minimal_cliques": [list(c) for c in q],
                "neighborhoods": [sorted(eta[l]) for l in range(model.spec.site_count)],
            },
            out,
        )
        print(file=out)
        return EXIT_OK
    rows = []
    for t in kept:
        for ix in np.ndindex(*t.values.shape):
            rows.append((",".join(map(str, t.clique)), ",".join(map(str, ix)), float(t.values[ix])))
    _emit_table(["clique", "labels", "value"], rows, out)
    print("# minimal_cliques\t" + " ".join("{" + ",".join(map(str, c)) + "}" for c in q), file=out)
    for l in range(model.spec.site_count):
        print(f"# neighborhood\t{l}\t" + ",".join(map(str, sorted(eta[l]))), file=out)
    return EXIT_OK


def cmd_check(model: Model, args, out) -> int:
    reports = run_checks(model)
    if args.format == "json":
        json.dump([r.to_dict() for r in reports], out, default=float)
        print(file=out)
    else:
        for r in reports:
            print(r.render(), file=out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_sample(model: Model, args, out) -> int:
    if args.method == "exact":
        samples = exact_sample(resolve(model).joint, args.seed, args.n)
    else:
        res = resolve(model)
        g, _ = model_gibbs(model, res)
        init = args.init if args.init is not None else _labels(res.joint.support.patterns[0])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NonErgodicWarning)
            run = gibbs_run(g, model.constraints, init, args.seed, args.n + args.burn_in, args.burn_in)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        samples = run.samples
    if args.format == "json":
        json.dump({"samples": samples.tolist()}, out)
        print(file=out)
    else:
        for p in samples:
            print(" ".join(map(str, _labels(p))), file=out)
    return EXIT_OK


def cmd_examples(args, out) -> int:
    for path in sorted(resources.files("gibbsmarkov").joinpath("data").iterdir()):
        if path.name.endswith(".json"):
            print(f"{path.name[:-5]}\t{path}", file=out)
    return EXIT_OK


def packaged_spec(name: str):
    """Path of a packaged example document, e.g. ``packaged_spec("known_good")``."""
    return resources.files("gibbsmarkov").joinpath("data", f"{name}.json")


COMMANDS = {
    "info": cmd_info,
    "support": cmd_support,
    "joint": cmd_joint,
    "decompose": cmd_decompose,
    "check": cmd_check,
    "sample": cmd_sample,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gibbsmarkov", description="Exact Markov/Gibbs random fields with hard constraints.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("info", "field summary, support size, flip-graph components"),
        ("support", "list the patterns satisfying the constraints"),
        ("joint", "the constrained joint, ln k and P(C)"),
        ("decompose", "canonical clique potentials and minimal cliques"),
        ("check", "run the equivalence reports; exit 1 if any fails"),
        ("sample", "draw patterns exactly or by heat-bath sweeps"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", required=True, help="path to a JSON field-spec document")
        p.add_argument("--format", choices=["tsv", "json"], default="tsv")
        if name == "decompose":
            p.add_argument("--tol", type=float, default=1e-12, help="potential magnitude treated as zero")
        if name == "sample":
            p.add_argument("--method", choices=["exact", "gibbs"], default="exact")
            p.add_argument("--n", type=int, default=10)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--burn-in", type=int, default=0)
            p.add_argument("--init", type=int, nargs="+", help="initial pattern for --method gibbs")
    sub.add_parser("examples", help="list packaged example documents")
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if args.command == "examples":
        return cmd_examples(args, out)
    try:
        model = load_spec(args.spec)
        return COMMANDS[args.command](model, args, out)
    except GuardExceeded as e:
        print(f"GuardExceeded: {e}", file=sys.stderr)
        return EXIT_GUARD
    except GibbsMarkovError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
