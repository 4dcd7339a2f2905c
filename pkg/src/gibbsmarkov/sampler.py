"""Exact and heat-bath sampling of constrained fields.

Random numbers come from NumPy's PCG64 bit generator
(``numpy.random.Generator(numpy.random.PCG64(seed))``); a draw with
uniform ``u`` selects the first label/outcome whose cumulative probability
exceeds ``u``.
"""
from __future__ import annotations

import warnings
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constraints import ConstraintSet, support
from .distribution import JointDistribution
from .errors import ConstraintViolatedInit, NonErgodicWarning
from .gibbs import GibbsSpec, local_conditionals_from_grf

GENERATOR = "PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _inverse_cdf(cdf: np.ndarray, u) -> np.ndarray:
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1)


def exact_sample(d: JointDistribution, seed: int, n: int) -> np.ndarray:
    """``n`` independent patterns from ``d`` as an ``(n, sites)`` array."""
    if n < 0:
        raise ValueError("n must be non-negative")
    cdf = np.cumsum(d.probs)
    cdf /= cdf[-1]
    u = make_rng(seed).random(n)
    return d.support.patterns[_inverse_cdf(cdf, u)]


@dataclass
class ChainResult:
    """Post burn-in states of a systematic-scan heat-bath chain, one per sweep."""

    samples: np.ndarray
    warnings: list[str] = field(default_factory=list)
    non_ergodic: bool = False


def gibbs_run(
    g: GibbsSpec,
    cs: ConstraintSet,
    init: Sequence[int],
    seed: int,
    sweeps: int,
    burn_in: int = 0,
) -> ChainResult:
    """Run ``sweeps`` sweeps of single-site heat-bath updates over sites ``0..n-1``.

    Each site update draws from the constraint-restricted local conditional,
    so the chain never leaves the constraint set. The first ``burn_in``
    sweeps are discarded. If the flip graph of the support is disconnected
    the chain cannot leave ``init``'s component; a ``NonErgodicWarning`` is
    issued and recorded on the result.
    """
    spec = g.spec
    x = list(spec.validate_pattern(init, "init"))
    if not cs.mask(spec, np.asarray([x]))[0]:
        raise ConstraintViolatedInit(f"initial pattern {x} violates the constraints")
    if sweeps < burn_in or burn_in < 0:
        raise ValueError("need 0 <= burn_in <= sweeps")

    notes = []
    s = support(spec, cs)
    if s.graph.component_count > 1:
        msg = (
            f"NonErgodicWarning: flip graph has {s.graph.component_count} components; "
            "the chain stays in the component of its initial pattern"
        )
        warnings.warn(msg, NonErgodicWarning, stacklevel=2)
        notes.append(msg)

    n = spec.site_count
    cdfs: dict[tuple[int, tuple[int, ...]], list[float]] = {}
    rng = make_rng(seed)
    out = np.empty((sweeps - burn_in, n), dtype=np.int64)
    block = 4096
    u: list[list[float]] = []
    for sweep in range(sweeps):
        k = sweep % block
        if k == 0:
            u = rng.random((min(block, sweeps - sweep), n)).tolist()
        for l in range(n):
            key = (l, tuple(x[:l] + x[l + 1 :]))
            cdf = cdfs.get(key)
            if cdf is None:
                probs = local_conditionals_from_grf(g, cs, l, np.asarray([x]))[0]
                cdf = np.cumsum(probs)
                cdf = (cdf / cdf[-1]).tolist()
                cdfs[key] = cdf
            x[l] = min(bisect_right(cdf, u[k][l]), len(cdf) - 1)
        if sweep >= burn_in:
            out[sweep - burn_in] = x
    return ChainResult(out, notes, bool(notes))
