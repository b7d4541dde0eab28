"""Exception types shared across the toolkit."""


class KerrbitError(Exception):
    """Base class for all toolkit errors."""


class InvalidSpec(KerrbitError):
    """Qubit specification violates its invariants."""


class BasisTooSmall(KerrbitError):
    """Charge-basis diagonalization has not converged; increase the basis."""


class TruncationOverflow(KerrbitError):
    """State weight has reached the edge of the Fock truncation."""


class ResonanceGuard(KerrbitError):
    """A detuning denominator is inside the guard band around a resonance."""

    def __init__(self, level, detuning, guard):
        self.level = level
        self.detuning = detuning
        self.guard = guard
        super().__init__(
            f"transition {level}: |detuning| = {abs(detuning):.3e} rad/s "
            f"inside guard band {guard:.3e} rad/s"
        )


class TwoPhotonResonanceGuard(ResonanceGuard):
    """A two-photon denominator is inside the guard band."""


class NotBistable(KerrbitError):
    """Thresholds requested outside the bistable regime."""


class InsufficientPoints(KerrbitError):
    """Not enough ladder points for the quadratic fit."""


class PeaksUnresolved(KerrbitError):
    """Q function shows a single peak straddling the classification radius."""


class StepSizeUnderflow(KerrbitError):
    """The integrator failed to advance (stiffness or tolerance failure)."""


class MissingKey(KerrbitError):
    """Required configuration key(s) absent."""


class UnknownKey(KerrbitError):
    """Configuration contains an unrecognized key."""


class UnitError(KerrbitError):
    """Configuration value failed to parse or has an inadmissible value."""


class NormalizationWarning(UserWarning):
    """Phase-space grid too small to capture the state's weight."""
