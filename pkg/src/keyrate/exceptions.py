"""keyrate exceptions and warning categories."""


class KeyrateError(Exception):
    """Base class of all keyrate errors."""


class InvalidDistributionError(KeyrateError):
    """A probability vector or matrix is not a valid distribution."""


class DomainError(KeyrateError, ValueError):
    """An argument lies outside the range where the operation is defined."""

    def __init__(self, name: str, value: object, domain: str):
        """Instantiate exception."""
        super().__init__(f"{name}={value!r} is outside the domain {domain}.")
        self.name = name
        self.value = value


class SingularParameterError(KeyrateError):
    """A chart parameter hits a point where the chart is not defined."""

    def __init__(self, f: float, g: float, reason: str = "normalizer vanishes"):
        """Instantiate exception."""
        super().__init__(f"Singular chart parameter (f={f}, g={g}): {reason}.")
        self.f = f
        self.g = g


class NotInLowerSetError(KeyrateError):
    """A distribution is not in the image of a lower-set chart."""


class NotAbsolutelyContinuousError(KeyrateError):
    """The support of a distribution exceeds the support of the reference."""


class DegenerateDistributionError(KeyrateError):
    """A distribution is degenerate for the requested computation."""


class GridError(KeyrateError):
    """An envelope grid is misconfigured."""


class InconsistencyError(KeyrateError):
    """A computed quantity contradicts a known structural property."""


class FormulaTranscriptionError(KeyrateError):
    """Two closed forms of the same constant disagree."""

    def __init__(self, name: str, first: float, second: float):
        """Instantiate exception."""
        super().__init__(
            f"The two closed forms of {name} disagree: {first!r} != {second!r}."
        )
        self.first = first
        self.second = second


class KeyrateWarning(UserWarning):
    """Base class of numerical warnings."""


class ConvergenceWarning(KeyrateWarning):
    """An envelope iteration stopped before reaching its tolerance."""

    def __init__(self, passes: int, last_delta: float):
        """Instantiate warning."""
        super().__init__(
            f"Envelope did not converge after {passes} passes "
            f"(last sup-norm change {last_delta:.3e})."
        )
        self.passes = passes
        self.last_delta = last_delta


class ExtrapolationWarning(KeyrateWarning):
    """The tail of a sequence used for extrapolation is not monotone."""


class ResolutionWarning(KeyrateWarning):
    """A slope grid is too coarse for the requested boundary."""


class MultiplicityWarning(KeyrateWarning):
    """The second singular value is not simple."""
