"""Exception hierarchy shared across the package."""


class RadnlsError(Exception):
    """Base class for all package-specific failures."""


class ConfigurationError(RadnlsError, ValueError):
    """Invalid grid, step-policy, or experiment configuration."""


class TailLeakError(RadnlsError):
    """Too much mass near the outer boundary for a global-norm operation."""


class AliasingError(RadnlsError):
    """Top-octave spectral energy above the dealiasing threshold."""


class InstabilityError(RadnlsError):
    """Non-finite field encountered during time stepping."""

    def __init__(self, step_index: int, t: float):
        self.step_index = step_index
        self.t = t
        super().__init__(f"non-finite field at step {step_index} (t = {t:.6g})")


class MassDriftError(RadnlsError):
    """Relative mass drift above the scheme's conservation budget."""


class PhaseGuardError(ConfigurationError):
    """Step size violates the dt * rho_max^2 phase-resolution guard."""


class RangeError(RadnlsError, ValueError):
    """Dyadic index outside the resolved partition range."""


class TruncationError(RadnlsError):
    """Boundary dyadic shells carry too much of a truncated sum."""


class DomainTooSmallError(RadnlsError):
    """No admissible tail radius exists inside the grid."""


class RescaleFailureError(RadnlsError):
    """Doubling search for the smallness rescaling exceeded its cap."""


class StrideError(RadnlsError):
    """Recorded samples are too sparse for the requested window or stencil."""


class ParseError(RadnlsError, ValueError):
    """Malformed config file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
