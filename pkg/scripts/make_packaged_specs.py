"""Regenerate the example documents shipped in ``gibbsmarkov/data``."""
import json
from pathlib import Path

import numpy as np

from gibbsmarkov import ConstraintSet, FieldSpec, ForbiddenWindow, GibbsSpec, PotentialTable, AllowList, DenyList
from gibbsmarkov.checker import gibbs_joint
from gibbsmarkov.document import Model, to_document
from gibbsmarkov.markov import LocalConditionalTable, local_conditionals_from_joint

DATA = Path(__file__).resolve().parents[1] / "src" / "gibbsmarkov" / "data"


def chain_model():
    spec = FieldSpec.binary(4)
    pots = [PotentialTable((l,), np.array([0.0, 0.4 - 0.2 * l])) for l in range(4)]
    pots += [
        PotentialTable((l, l + 1), np.array([[0.0, 0.0], [0.0, -0.8 + 0.3 * l]]))
        for l in range(3)
    ]
    cs = ConstraintSet((ForbiddenWindow((0, 3), (1, 1)),))
    return spec, cs, GibbsSpec(spec, tuple(pots))


def write(name, model):
    (DATA / f"{name}.json").write_text(json.dumps(to_document(model), indent=1) + "\n")


def main():
    spec, cs, g = chain_model()
    write("chain_gibbs", Model(spec, cs, "gibbs", gibbs=g))

    joint, _ = gibbs_joint(g, cs)
    table = local_conditionals_from_joint(joint)
    write("known_good", Model(spec, cs, "conditionals", conditionals=table))

    # Scale one conditional entry by 1.1 and renormalize: no joint has these conditionals.
    entries = dict(table.entries)
    key = (1, (0, 0, 0))
    p = entries[key].copy()
    p[1] *= 1.1
    entries[key] = p / p.sum()
    write("perturbed", Model(spec, cs, "conditionals", conditionals=LocalConditionalTable(spec, cs, entries)))

    contradictory = ConstraintSet((AllowList(((0, 0, 0, 0),)), DenyList(((0, 0, 0, 0),))))
    write("contradictory", Model(spec, contradictory, "gibbs", gibbs=g))


if __name__ == "__main__":
    main()
