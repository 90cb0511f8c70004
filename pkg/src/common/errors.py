"""Exception hierarchy shared by every resistor-sep package."""


class ResistorSepError(Exception):
    """Base class for all library errors."""


class InputError(ResistorSepError, ValueError):
    """Caller supplied something the operation cannot accept (CLI exit 2)."""


class CapacityError(ResistorSepError):
    """Request exceeds a configured size limit (CLI exit 2)."""


class InternalError(ResistorSepError, RuntimeError):
    """A numerical invariant broke; signals a bug rather than bad input."""


# --- graph_core ---
class DisconnectedGraph(InputError):
    pass


class NonpositiveConductance(InputError):
    pass


class DuplicateEdge(InputError):
    pass


class SelfLoop(InputError):
    pass


class UnknownVertex(InputError, KeyError):
    pass


class BadRadiusSequence(InputError):
    pass


class BudgetExceeded(CapacityError):
    pass


# --- potential_theory ---
class EmptyBoundary(InputError):
    pass


class EmptySet(InputError):
    pass


class OverlappingSets(InputError):
    pass


class ComplementEmpty(InputError):
    pass


class SameVertex(InputError):
    pass


class MissingValue(InputError):
    pass


class BoundaryEdgePresent(InputError):
    pass


class TooFewLevels(InputError):
    pass


class SingularSystem(InternalError):
    pass


class MaximumPrincipleViolated(InternalError):
    pass


class InconsistentSolutions(InternalError):
    pass


# --- exclusion_sim ---
class RateNonpositive(InputError):
    pass


class DegenerateMarginal(InputError):
    pass


class StateSpaceTooLarge(CapacityError):
    pass


class NotIrreducible(InternalError):
    pass


class ZeroTotalRate(ResistorSepError):
    """Absorbing configuration reached; the trajectory completes trivially."""


# --- ergodicity_harness ---
class BallTooLarge(CapacityError):
    pass


class BallTooSmall(InputError):
    pass


class InconsistentPartition(InputError):
    pass


class KOutOfRange(InputError):
    pass


class UnequalSizes(InputError):
    pass


class NotAPartition(InputError):
    pass


class NonSymmetrizable(InternalError):
    pass


class InsufficientTrajectories(ResistorSepError):
    """No exceedances observed; only a one-sided bound can be reported."""


# --- cli ---
class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ValidationError(InputError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
