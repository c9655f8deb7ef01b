"""Exception types shared across the package."""


class RewbenchError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RewbenchError):
    """Invalid run, stream, or domain configuration (CLI exit code 2)."""


class NumericalError(RewbenchError):
    """Numerical failure while running an experiment (CLI exit code 3)."""


class EmptyDecisionSet(ConfigurationError):
    """No sub-cube of the bounding cube contains a detectable in-set point."""


class RepresentativeSearchFailed(RewbenchError):
    """A sub-cube flagged as overlapping yielded no in-set point within budget."""

    def __init__(self, index):
        super().__init__(f"no representative found for sub-cube {index!r}")
        self.index = index


class IndexOutOfRange(RewbenchError):
    """A sub-cube index has a coordinate outside [1, 2^m]."""


class NotInIndexSet(RewbenchError):
    """The sub-cube was not flagged as overlapping the decision set."""


class MissingCost(RewbenchError):
    """A cost collection lacks a value for some grid point."""

    def __init__(self, index):
        super().__init__(f"no cost value for grid point {index!r}")
        self.index = index


class PointNotInDomain(RewbenchError):
    """The queried point is not part of the discretized index set."""


class BottomLayer(RewbenchError):
    """Bottom-layer subsets are single points and have no children."""


class RootHasNoParent(RewbenchError):
    """The layer-0 subset is the whole index set; nothing contains it."""


class InvalidRound(RewbenchError):
    """Round counter out of step with the state (rounds are 1-based)."""


class NormalizationOutOfRange(NumericalError):
    """A normalized subset cost fell outside [0, 1] beyond tolerance.

    Signals a cost stream that violates its declared Lipschitz constant.
    """

    def __init__(self, subset):
        super().__init__(f"normalized cost out of [0, 1] for subset {subset!r}")
        self.subset = subset


class CostExceedsCeiling(NumericalError):
    """A revealed cost exceeded the configured ceiling."""


class ProjectionLeftSet(NumericalError):
    """The projector returned a point outside the decision set."""


class ParamOutOfRange(ConfigurationError):
    """A stream parameter lies outside its legal interval."""


class MismatchedHorizon(ConfigurationError):
    """Compared runs must share the same horizon."""
