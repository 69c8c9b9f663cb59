"""Exception hierarchy shared by every rselab module."""


class RSELabError(Exception):
    """Base class for all errors raised by rselab."""


class NonCommensurateWavenumber(RSELabError):
    pass


class GridMismatch(RSELabError):
    pass


class ZeroField(RSELabError):
    pass


class MarginTooSmall(RSELabError):
    pass


class CFLViolation(RSELabError):
    pass


class AllMasked(RSELabError):
    pass


class TimeSliceMismatch(RSELabError):
    pass


class NotStationary(RSELabError):
    pass


class NotNormalized(RSELabError):
    pass


class NonNullWavevector(RSELabError):
    pass


class NotSinglePhase(RSELabError):
    pass


class ConfigError(RSELabError):
    """Invalid scenario configuration; ``key_path`` names the offending entry."""

    def __init__(self, message, key_path=None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class IoError(RSELabError, OSError):
    pass


class ScenarioError(RSELabError):
    """A module error raised while running a named scenario."""

    def __init__(self, scenario, cause):
        self.scenario = scenario
        self.cause = cause
        super().__init__(f"scenario {scenario!r}: {type(cause).__name__}: {cause}")
