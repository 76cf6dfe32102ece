"""Exception types raised across the package."""


class GCFPError(Exception):
    """Base class for all package errors."""


class ConfigError(GCFPError, ValueError):
    """A scenario, space, graph or map description is invalid."""


class ParameterError(ConfigError):
    """A parameter triple violates the bounds of its condition variant."""


class DimensionError(GCFPError, ValueError):
    """Point dimension does not match the space."""


class PreconditionError(GCFPError, ValueError):
    """An operation was called outside its documented hypotheses."""


class SparseRelationError(GCFPError):
    """Sampling could not find enough related pairs within its budget."""


class HypothesisFailure(GCFPError):
    """Observed behaviour contradicts a consequence of the contraction hypotheses."""
