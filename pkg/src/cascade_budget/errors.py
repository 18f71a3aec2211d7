"""Exception and warning types raised by the library."""


class CascadeError(ValueError):
    """Base class for invalid inputs and violated preconditions."""


class OutOfRange(CascadeError):
    """A signal quality lies outside the open interval (0.5, 1)."""


class SteppedAfterCascade(CascadeError):
    """A walk was stepped after it had already entered a cascade."""


class ToleranceUnreachable(CascadeError):
    """A series could not meet its tolerance within the term budget."""


class ConstantMismatch(CascadeError):
    """A supplied fraction r/q does not match the cascade constant."""


class NotRational(CascadeError):
    """No small-denominator fraction matches the cascade constant."""


class NoSolution(CascadeError):
    """No quality p2 < 1 produces the requested cascade constant."""


class StepCapExceeded(RuntimeError):
    """A simulated path was still in play after the step cap."""


class RegimeViolation(CascadeError):
    """The budget is outside the regime b < 1 - p2."""


class InfeasibleEqualize(CascadeError):
    """Equalizing the qualities would need a negative improvement."""


class DomainViolation(CascadeError):
    """A monotonicity sweep leaves the domain where the claim holds."""


class NearIntegerAmbiguity(UserWarning):
    """(i+1)/a is within rounding of an integer for a constant deemed irrational."""
