"""Probability tables over a support, rebuilt from ratios to a reference outcome.

Everything is held in log-space. Probabilities follow from the ratios
``r_j = p_j / p_ref`` alone because ``sum_j r_j = 1 / p_ref``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .constraints import ConstraintSet, Support, restrict_support

#: Tolerance on ``sum(exp(log_probs)) == 1``.
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RatioTable:
    """``log_ratios[j] = ln(p_j / p_ref)`` for every support index ``j``."""

    support: Support
    reference_index: int
    log_ratios: np.ndarray

    def __post_init__(self):
        lr = np.asarray(self.log_ratios, dtype=float)
        if lr.shape != (len(self.support),):
            raise ValueError("one log-ratio per support member required")
        if not np.all(np.isfinite(lr)):
            raise ValueError("log-ratios must be finite")
        if lr[self.reference_index] != 0.0:
            raise ValueError("log-ratio of the reference must be exactly 0")
        object.__setattr__(self, "log_ratios", lr)


@dataclass(frozen=True, eq=False)
class EnergyTable:
    """One finite energy per member of ``support``."""

    support: Support
    energies: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.energies, dtype=float)
        if u.shape != (len(self.support),):
            raise ValueError("one energy per support member required")
        if not np.all(np.isfinite(u)):
            raise ValueError("energies must be finite")
        object.__setattr__(self, "energies", u)

    def __len__(self):
        return len(self.energies)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Strictly positive probabilities ``P(X | C)`` over a support.

    ``log_normalizer`` is ``ln k`` when the joint was built from weights
    ``k * exp(w)``; it is ``None`` when no normalizer was involved.
    """

    support: Support
    log_probs: np.ndarray
    log_normalizer: float | None = None

    def __post_init__(self):
        lp = np.asarray(self.log_probs, dtype=float)
        if lp.shape != (len(self.support),):
            raise ValueError("one log-probability per support member required")
        if not np.all(np.isfinite(lp)):
            raise ValueError("probabilities must be strictly positive on the support")
        total = np.exp(lp).sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "log_probs", lp)

    @classmethod
    def from_log_weights(cls, s: Support, log_weights) -> "JointDistribution":
        """Normalize unnormalized log-weights; records ``ln k = -logsumexp``."""
        lw = np.asarray(log_weights, dtype=float)
        log_z = float(logsumexp(lw))
        return cls(s, lw - log_z, -log_z)

    @classmethod
    def from_probs(cls, s: Support, probs) -> "JointDistribution":
        p = np.asarray(probs, dtype=float)
        if np.any(p <= 0):
            raise ValueError("probabilities must be strictly positive")
        return cls.from_log_weights(s, np.log(p))

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    def __len__(self):
        return len(self.log_probs)

    def prob(self, x) -> float:
        return float(np.exp(self.log_probs[self.support.index_of(x)]))


def ratios_from_joint(d: JointDistribution, reference_index: int = 0) -> RatioTable:
    lr = d.log_probs - d.log_probs[reference_index]
    lr[reference_index] = 0.0
    return RatioTable(d.support, reference_index, lr)


def probabilities_from_ratios(rt: RatioTable) -> JointDistribution:
    """``p_j = r_j / sum_k r_k``, via log-sum-exp."""
    return JointDistribution.from_log_weights(rt.support, rt.log_ratios)


def conditional_restrict(full: JointDistribution, cs: ConstraintSet) -> JointDistribution:
    """Condition ``full`` on ``cs``: drop outcomes outside it and rescale by ``1/P(C)``.

    Raises ``EmptySupport`` when no member of ``full``'s support satisfies ``cs``.
    """
    sub, keep = restrict_support(full.support, cs)
    return JointDistribution.from_log_weights(sub, full.log_probs[keep])


def ratio(d: JointDistribution, i: int, j: int) -> float:
    """``p_j / p_i``."""
    return float(np.exp(d.log_probs[j] - d.log_probs[i]))


def energy_from_joint(d: JointDistribution) -> EnergyTable:
    """Energy ``U = -ln P`` on ``d``'s support, gauged to 0 at the rank-0 member."""
    u = d.log_probs[0] - d.log_probs
    u[0] = 0.0
    return EnergyTable(d.support, u)
