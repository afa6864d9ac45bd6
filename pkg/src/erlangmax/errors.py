"""Exception types raised by erlangmax."""


class ErlangMaxError(ValueError):
    """Base class for all domain errors raised by this package."""


class RepresentationUnstable(ErlangMaxError):
    """The direct coefficient formula was requested for k above its cap."""


class PoleAtOne(ErlangMaxError):
    """zeta(s) was requested at its pole s = 1."""


class DomainError(ErlangMaxError):
    """An argument is outside the documented domain of an operation."""


class ConvergenceGuard(ErlangMaxError):
    """The Gaussian random-walk series was requested outside its convergence region."""


class ConditionViolated(ErlangMaxError):
    """The small-(1 - rho) conditions of the 1 - sigma_j approximation fail."""


class TruncationExcess(ErlangMaxError):
    """Too many Monte Carlo paths hit the step cap before the stopping rule fired."""

    def __init__(self, truncated: int, paths: int):
        self.truncated = truncated
        self.paths = paths
        super().__init__(
            f"{truncated} of {paths} paths hit max_steps "
            f"(fraction {truncated / paths:.3g} > 1e-3)"
        )
