"""Prime geodesics of the modular group and partial Euler products of its Selberg zeta function."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CoverageError, DomainError, GelError, InsufficientCheckpointsError, ParseError,
    RangeError, RegionError, ResourceLimitError, ValidationError, VersionError,
)
from .quadratic import (  # noqa: E402
    DiscriminantRecord, NormSpectrum, QuadraticForm, build_spectrum, build_spectrum_by_trace,
    class_number, curly_L, decompose_trace, is_discriminant, pell_fundamental,
)
