"""Exception types shared across the package."""


class StablearnError(Exception):
    """Base class."""


class DimensionMismatch(StablearnError, ValueError):
    pass


class MalformedPauli(StablearnError, ValueError):
    pass


class SingularMatrix(StablearnError, ValueError):
    pass


class DependentGenerators(StablearnError, ValueError):
    pass


class InvalidFrame(StablearnError, ValueError):
    pass


class InvalidTableau(StablearnError, ValueError):
    pass


class NonCliffordGate(StablearnError, ValueError):
    pass


class NonCliffordCollapse(StablearnError):
    """T gates whose combined action on the state is not Clifford-plus-T-stage."""


class GuardExceeded(StablearnError, ValueError):
    pass


class ConsumedHandle(StablearnError):
    pass


class ProvenanceMismatch(StablearnError):
    pass


class LearnerFailure(StablearnError):
    """Base for failures a caller may retry with fresh samples."""


class RankDeficient(LearnerFailure):
    pass


class SearchFailed(LearnerFailure):
    pass


class InconsistentTarget(LearnerFailure):
    pass
