"""Exception types shared across the package.

Every error carries an ``exit_code`` so the command-line front end can map
failures to distinct, documented process exit codes (success is 0, generic
I/O failures are 1, and 2 is reserved for usage errors).
"""


class TrackingError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 10


class DomainError(TrackingError):
    """An argument is outside the mathematical domain of an operation."""

    exit_code = 11


class DegenerateGeometry(TrackingError):
    """A point coincides with an anchor center; the field model is singular there."""

    exit_code = 12


class OutOfRange(TrackingError):
    """A measured amplitude is below the usable noise floor."""

    exit_code = 13


class TrajectoryOutOfBounds(TrackingError):
    """A trajectory point comes closer to an anchor than the model allows."""

    exit_code = 14


class NonMonotonicTimestamp(TrackingError):
    """A sample pushed into a buffer has a timestamp earlier than its predecessor."""

    exit_code = 15


class BinMisalignment(TrackingError):
    """Requested tone frequency does not fall on an exact DFT bin of the window."""

    exit_code = 16


class BufferNotFull(TrackingError):
    """Amplitude extraction was requested before the sample window filled up."""

    exit_code = 17


class NotCalibrated(TrackingError):
    """The rig has no calibration constants; run calibration first."""

    exit_code = 18


class InsufficientSamples(TrackingError):
    """Too little usable data for calibration."""

    exit_code = 19


class ExcessiveSpread(TrackingError):
    """Per-window calibration estimates disagree too much (sensor moved?)."""

    exit_code = 20


class EmptyInput(TrackingError):
    """An operation that needs at least one element received none."""

    exit_code = 21


class ConfigError(TrackingError):
    """Configuration file or override could not be parsed or validated."""

    exit_code = 22
