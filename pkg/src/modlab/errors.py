"""Exception types shared across the package."""


class ModlabError(Exception):
    """Base class for all package-specific errors."""


class NonAdmissibleCarrier(ModlabError):
    """Carrier wavenumber does not fall on the discrete frequency lattice."""


class GridTooSmall(ModlabError):
    """Grid cannot represent the requested carrier (index >= nx/2)."""


class GridMismatch(ModlabError):
    """Operation mixed fields living on different grids."""


class NonFinite(ModlabError):
    """A field sample became NaN or infinite during time stepping."""


class DepthUnsupported(ModlabError):
    """Corrector depth beyond the guaranteed level without the experimental flag."""


class HorizonExceeded(ModlabError):
    """Requested evaluation time lies outside the stored trajectory."""


class NoConvergence(ModlabError):
    """A fixed-point iteration failed to reach tolerance."""


class BlowupPenalty(ModlabError):
    """Control norm reached 1; the penalized evolution cannot continue."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class PenaltyScaleInvalid(ModlabError):
    """No cutoff level exists: C_growth * eps^(q+4) >= 64."""


class DomainError(ModlabError):
    """Function argument outside its mathematical domain (e.g. g at lambda >= 1)."""


class DegenerateFit(ModlabError):
    """Log-log fit impossible: nonpositive values or too few points."""


class ParseError(ModlabError):
    """Malformed configuration text."""


class ValidationError(ModlabError):
    """Configuration violated a cross-field constraint."""
