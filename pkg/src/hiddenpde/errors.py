"""Exception hierarchy shared across the toolkit.

Every error raised by the package derives from HiddenPdeError so callers
(and the CLI exit-code mapping) can distinguish configuration mistakes,
numerical failures, and I/O problems.
"""


class HiddenPdeError(Exception):
    """Base class for all package errors."""


class ConfigError(HiddenPdeError):
    """Invalid configuration: bad architecture, feature mismatch, bad spec."""


class InvalidArchitectureError(ConfigError):
    """Layer widths are empty, too short, or non-positive."""


class ShapeError(ConfigError):
    """Input dimension does not match the network or grid layout."""


class UnsupportedOrderError(ConfigError):
    """Derivative order beyond what jet propagation supports."""


class NumericError(HiddenPdeError):
    """Non-finite value encountered during computation."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DivergenceError(NumericError):
    """Time integration blew up; carries the time reached."""

    def __init__(self, message, t_reached):
        super().__init__(message)
        self.t_reached = t_reached


class ResolutionError(NumericError):
    """Spectral tail holds too much energy; the run is under-resolved."""


class TrainingDivergedError(NumericError):
    """Optimization produced a non-finite loss; carries the last good state."""

    def __init__(self, message, checkpoint=None):
        super().__init__(message)
        self.checkpoint = checkpoint


class SamplingError(HiddenPdeError):
    """Requested more sample points than the region contains."""


class IoError(HiddenPdeError):
    """File unreadable, malformed, or unwritable."""


class IngestionError(IoError):
    """Grid/dataset file violates the documented layout.

    ``offset`` is a byte offset (binary files) or record index (CSV).
    """

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class AlignmentError(HiddenPdeError):
    """Two grids do not share axes over the requested region."""


class DegenerateRegionError(HiddenPdeError):
    """Reference field has zero norm on the region."""


class DomainError(HiddenPdeError):
    """Requested evaluation point lies outside the solve domain."""
