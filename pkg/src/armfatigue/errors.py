"""Exception and warning types shared across the simulator."""


class UnreachableTarget(ValueError):
    """Hand target lies outside the arm's reachable annulus."""


class TimeOutOfRange(ValueError):
    """Sample time falls outside the trajectory leg's [0, duration] window."""


class SingularTrajectory(RuntimeError):
    """A trajectory sample lies within singular tolerance of full extension."""


class OutOfRangeAnthropometry(ValueError):
    """Stature or body mass is outside the supported regression range."""


class ZeroCapacity(RuntimeError):
    """Joint capacity evaluated to <= 0 on an active sample; demand ratio undefined."""


class NegativeTime(ValueError):
    """Clock query before the start of work."""


class ParseError(ValueError):
    """Scenario or grid file is not valid JSON."""


class SchemaError(ValueError):
    """Scenario or grid file has missing or unknown keys."""


class ValidationError(ValueError):
    """Scenario field violates an invariant.

    ``field`` carries the dotted path of the offending entry when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class SingularPostureWarning(UserWarning):
    """Inverse kinematics solved within singular tolerance of full extension."""


class NonPositiveCapacityWarning(UserWarning):
    """A strength polynomial evaluated to <= 0 and was clamped; the posture is
    outside the regression's validity range."""
