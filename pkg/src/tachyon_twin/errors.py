"""Exception types raised across the package."""


class TachyonTwinError(Exception):
    """Base class for all package errors."""


class DegenerateBoost(TachyonTwinError):
    """A boost carries a tachyon mode onto the zero-energy sphere |k| = m."""

    def __init__(self, message, threshold_speed=None):
        super().__init__(message)
        self.threshold_speed = threshold_speed


class IncommensurateMode(TachyonTwinError):
    """A mode label does not fit the periodic box."""


class TruncationOverflow(TachyonTwinError):
    """A creation operator would push a Fock state beyond the particle cap."""


class NonConvergent(TachyonTwinError):
    """A quadrature or extrapolation failed to reach its tolerance."""


class SingularPoint(TachyonTwinError):
    """The propagator was requested at the contact singularity x = 0."""


class OffShellLeg(TachyonTwinError):
    """A process leg violates its mass-shell or positive-energy condition."""
