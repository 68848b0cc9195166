"""Exception hierarchy for the fluxreadout package."""
from __future__ import annotations


class FluxReadoutError(Exception):
    """Base class for all computation errors raised by this package."""


class TruncationError(FluxReadoutError):
    """Eigenenergies did not converge when the basis size was enlarged."""


class DivergenceProximityError(FluxReadoutError):
    """A qubit transition is too close to the resonator frequency for the
    perturbative dispersive shift to be meaningful.

    Carries the offending flux bias, the transition (i, j) and the residual
    detuning |omega_ji - omega_r| in rad/s.
    """

    def __init__(self, message, flux=None, transition=None, detuning=None):
        super().__init__(message)
        self.flux = flux
        self.transition = transition
        self.detuning = detuning


class ResolutionError(FluxReadoutError):
    """Time step too coarse for the requested pulse or dynamics."""


class FitError(FluxReadoutError):
    """A least-squares fit failed or the data do not support the model."""


class SingularMatrixError(FluxReadoutError):
    """Crosstalk matrix is singular or too ill-conditioned to invert."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class ConfigError(FluxReadoutError):
    """Invalid configuration file or field value."""
