"""Exception hierarchy."""


class GeometryError(Exception):
    """Base class for every error raised by the engine."""


class OutOfDomain(GeometryError):
    pass


class NotSPD(GeometryError):
    """Metric (or Gram matrix) failed Cholesky factorization."""


class DegenerateInput(GeometryError):
    pass


class OddDimensionMismatch(GeometryError):
    """Horizontal/vertical spans are not of dimensions (even, odd)."""


class DimensionMismatch(GeometryError):
    pass


class FrameMismatch(GeometryError):
    pass


class RankDeficient(GeometryError):
    pass


class MissingStructure(GeometryError):
    pass


class NotVertical(GeometryError):
    pass


class PreconditionNotMet(GeometryError):
    pass


class ConstructionInvalid(GeometryError):
    pass


class DerivativeUnavailable(GeometryError):
    """Second derivatives requested from a first-order-only expression."""


class ConfigError(GeometryError):
    pass


class UnknownExample(ConfigError):
    pass


class UnknownCheck(ConfigError):
    pass
