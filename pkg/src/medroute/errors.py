"""Exception hierarchy shared by every module."""


class RoutingError(Exception):
    """Base class for all errors raised by medroute."""


class ParseError(RoutingError, ValueError):
    pass


class ValidationError(RoutingError, ValueError):
    """An instance or input failed one or more invariants.

    ``violations`` holds the individual findings, each naming a field path.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {lines}")


class InfeasibleError(RoutingError):
    """Total demand exceeds what the whole fleet can carry."""


class NonReciprocalMatrixError(RoutingError, ValueError):
    pass


class ConvergenceFailure(RoutingError):
    pass


class DuplicateSiteError(RoutingError, ValueError):
    pass


class UnknownSiteError(RoutingError, ValueError):
    pass


class MissingEdgeError(RoutingError, KeyError):
    pass


class MissingRiskProfileError(RoutingError, KeyError):
    pass


class ZeroSpeedError(RoutingError, ValueError):
    pass


class ZeroSegmentAreaError(RoutingError, ValueError):
    pass


class NegativeDurationError(RoutingError, ValueError):
    pass


class DegenerateFitnessError(RoutingError):
    pass


class SeedExhaustedError(RoutingError):
    pass


class InstanceTooLargeError(RoutingError, ValueError):
    pass
