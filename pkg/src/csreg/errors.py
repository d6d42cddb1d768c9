"""Exception types raised by estimation and quadrature routines."""


class CsregError(Exception):
    """Base class for errors raised by this package."""


class NoCrossingError(CsregError):
    """The score has no sign change on the search grid."""


class BracketError(CsregError):
    """A root bracket does not actually bracket a sign change."""


class ExcludedError(CsregError):
    """An evaluation point has a zero kernel denominator (no data within h)."""


class AllExcludedError(CsregError):
    """Every evaluation point was excluded (zero kernel denominator)."""


class SingularInformationError(CsregError):
    """An information or scaling matrix is singular and cannot be inverted."""


class QuadratureError(CsregError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


class AllFailedError(CsregError):
    """Every Monte Carlo replication failed for a method."""
