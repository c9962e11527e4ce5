"""Exception types shared across the package."""


class SwarmsimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SwarmsimError):
    """Invalid or inconsistent configuration input."""


class QueryOutsideBand(SwarmsimError):
    """Normal/gradient query at a point too far from the boundary."""


class RootNotBracketed(SwarmsimError):
    """Custom-domain hit search failed to bracket a boundary crossing.

    Signals a scan too coarse for the geometry; the caller should reduce dt.
    """


class MaxReflectionsExceeded(SwarmsimError):
    """More reflections in one step than allowed; dt too large near tangency."""


class UnsatisfiableSupport(SwarmsimError):
    """Initial spatial law cannot be placed strictly inside the domain."""


class MissingSnapshots(SwarmsimError):
    """Trajectory was not recorded densely enough for the requested estimator."""


class MissingCommonPath(SwarmsimError):
    """Trajectory lacks the realized common-noise path."""


class MissingIdiosyncraticPaths(SwarmsimError):
    """Trajectory lacks recorded per-particle noise paths."""


class LayerExceedsBand(SwarmsimError):
    """Boundary-layer width exceeds the domain's trusted gradient band."""


class StepTooCoarse(SwarmsimError):
    """A particle reflected while inside a test function's spatial support.

    The weak-form quadrature assumes no boundary contact inside supp(psi)
    within a single step; reduce dt or shrink the support.
    """
