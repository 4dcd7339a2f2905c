"""Exception and warning types shared across the package."""


class GibbsMarkovError(Exception):
    """Base class for all package errors."""


class GuardExceeded(GibbsMarkovError):
    """An enumeration would exceed the configured size limit."""


class EmptySupport(GibbsMarkovError):
    """No pattern satisfies the constraint set."""


class MalformedSpec(GibbsMarkovError):
    """Invalid model input; ``location`` names the offending section or key."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class BoundaryNotExtendable(GibbsMarkovError):
    """No label at the site completes the boundary into an admissible pattern."""


class ConstraintViolatedInit(GibbsMarkovError):
    """The initial sampler state does not satisfy the constraints."""


class NonIdentifiable(GibbsMarkovError):
    """Local conditionals fix the joint only within flip-graph components.

    ``components`` holds, per component, the support indices of its members.
    """

    def __init__(self, components):
        self.components = [list(map(int, c)) for c in components]
        self.component_count = len(self.components)
        super().__init__(
            f"flip graph has {self.component_count} components; "
            "supply component masses to fix the cross-component split"
        )


class InconsistentConditionals(GibbsMarkovError):
    """Local conditionals do not come from any joint distribution.

    ``residual`` is the worst log-space cycle residual and ``cycle`` the
    support indices of a witness cycle (closed: first == last).
    """

    def __init__(self, residual, cycle):
        self.residual = float(residual)
        self.cycle = [int(i) for i in cycle]
        super().__init__(f"cycle residual {self.residual:.6g} along cycle {self.cycle}")


class NonErgodicWarning(UserWarning):
    """Single-site moves cannot leave the initial flip-graph component."""
