"""Exact enumeration tools for Markov and Gibbs random fields with hard constraints."""
from .checker import (
    Report,
    verify_grf_to_mrf,
    verify_mrf_to_grf,
    verify_positivity_gibbs_form,
    verify_ratio_invariance,
)
from .constraints import (
    AllowList,
    ConstraintSet,
    CountConstraint,
    DenyList,
    FlipGraph,
    ForbiddenWindow,
    Support,
    evaluate,
    flip_graph,
    intersect,
    no_adjacent,
    support,
)
from .decomposition import canonical_potentials, minimal_clique_set
from .distribution import (
    EnergyTable,
    JointDistribution,
    RatioTable,
    conditional_restrict,
    energy_from_joint,
    probabilities_from_ratios,
    ratio,
    ratios_from_joint,
)
from .errors import (
    BoundaryNotExtendable,
    ConstraintViolatedInit,
    EmptySupport,
    GuardExceeded,
    InconsistentConditionals,
    MalformedSpec,
    NonErgodicWarning,
    NonIdentifiable,
)
from .field import (
    CliqueSet,
    FieldSpec,
    NeighborhoodSystem,
    cliques_containing,
    enumerate_patterns,
    neighborhood_from_cliques,
)
from .gibbs import (
    GibbsSpec,
    PotentialTable,
    energy,
    energies,
    joint_from_energy,
    local_conditional_from_grf,
    probability_of_constraint,
)
from .markov import (
    LocalConditionalTable,
    check_markovianity,
    joint_from_local_conditionals,
    local_conditionals_from_joint,
)
from .sampler import exact_sample, gibbs_run

__version__ = "0.1.0"
