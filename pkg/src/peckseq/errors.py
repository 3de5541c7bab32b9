"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: input validation -> 4, precision
exhaustion / unresolvable rounding -> 3, bound violation -> 2.
"""


class PeckseqError(Exception):
    pass


class InputValidationError(PeckseqError):
    """Bad user input (malformed cubic, coordinates, flags)."""


class ReducibleCubicError(InputValidationError):
    """The cubic has a rational root."""


class ThreeRealRootsError(InputValidationError):
    """Discriminant is nonnegative: not the one-real-root case."""


class PrecisionError(PeckseqError):
    """Base for failures that more precision might fix."""


class AmbiguousRoundingError(PrecisionError):
    """An enclosure straddles a rounding boundary (half-integer or
    comparison threshold) and escalation hit the configured cap.

    Threshold counters attach ``count_bounds = (lo, hi)``: the definite
    count and the count with every undecidable term included.
    """

    def __init__(self, msg, count_bounds=None):
        super().__init__(msg)
        self.count_bounds = count_bounds


class PrecisionExhaustedError(PrecisionError):
    """Escalation reached the precision cap without certifying."""


class CertificationFailedError(PrecisionError):
    """Continued-fraction expansion could not certify the requested depth.

    Carries the stable prefix so callers can keep the certified part.
    """

    def __init__(self, depth_achieved, partial=None):
        super().__init__(f"certified only {depth_achieved} quotients")
        self.depth_achieved = depth_achieved
        self.partial = partial


class UnitNotFoundError(PeckseqError):
    """Window scan exhausted without finding a unit."""

    def __init__(self, k_max):
        super().__init__(
            f"no unit found with k <= {k_max}; raise the scan bound "
            "or supply the unit explicitly"
        )
        self.k_max = k_max


class InvalidUnitError(InputValidationError):
    """Element is not a valid unit for the construction."""


class BoundViolatedError(PeckseqError):
    """A certified bound failed: implementation bug signal, never expected."""


class DigitBudgetExceededError(PeckseqError):
    """An exact integer was requested beyond the configured digit budget."""


class DenominatorBoundError(PeckseqError):
    """A generated coordinate has a denominator not dividing d: the
    supplied denominator bound is invalid for this field."""
