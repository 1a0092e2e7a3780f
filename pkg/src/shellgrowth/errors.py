"""Exception types raised by the geometry, net, growth and verification layers."""


class ShellGrowthError(Exception):
    """Base class for library errors."""


class InputError(ShellGrowthError):
    """Bad user input: unknown names, malformed expressions or configs."""


class NumericalError(ShellGrowthError):
    """A computation could not be carried out reliably."""


class DegenerateSurface(NumericalError):
    """Tangent vectors are (nearly) parallel so the normal is undefined."""


class UmbilicPoint(NumericalError):
    """Principal directions are indeterminate at an umbilic."""


class UmbilicEncountered(UmbilicPoint):
    """A traced curvature line ran into an umbilic; ``location`` holds the θ point."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class NotCurvatureNet(NumericalError):
    """Coordinate curves are not lines of curvature (F or M non-zero)."""


class OrientationError(NumericalError):
    """The reparametrization reverses orientation somewhere."""


class IntegrationDiverged(NumericalError):
    """The streamline integrator hit its step floor or step budget."""


class NonBijective(NumericalError):
    """The gridded net folds over itself."""


class DomainError(NumericalError):
    """A map was evaluated outside the region where it is defined."""


class ThicknessSingularity(NumericalError):
    """|κ Z| reached 1 inside the shell, so the shifter is not invertible."""


class UnknownEntry(InputError):
    """No catalog entry with the requested name."""


class NoOracle(InputError):
    """The catalog entry carries no closed-form growth functions."""


class ConfigError(InputError):
    """Invalid run configuration."""
