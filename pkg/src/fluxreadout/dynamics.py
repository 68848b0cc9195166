"""Semi-classical cavity dynamics under a flux pulse and coherent drive.

For each qubit state the coherent cavity amplitude obeys the linear Langevin
equation

    alpha_dot = -(i*Delta_{+/-}(t) + kappa/2) * alpha + epsilon,

with Delta_{+/-}(t) = (omega_r0(t) + omega_r1(t))/2 - omega_RO +/- chi(t)
(+ for qubit state |1>, - for |0>) and input field alpha_in = -epsilon/sqrt(kappa).
The output field follows the boundary condition
alpha_out = alpha_in + sqrt(kappa)*alpha.  Integration is explicit RK4 on a
fixed grid; the state-dependent pulls along the flux excursion come from a
precomputed 200-point dispersive table with linear interpolation.

The boxcar signal-to-noise ratio is

    SNR(tau) = c * sqrt(2*eta/tau) * |int_0^tau (alpha_out1 - alpha_out0) dt|,

with c a global noise-normalization constant (default 1).  The implied
discrimination error is err = erfc(SNR/2)/2.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import erfc

from .dispersive import RESONANCE_GUARD, ResonanceFlag, qubit_pulls
from .errors import DivergenceProximityError, ResolutionError
from .fluxonium import (DEFAULT_BASIS_SIZE, DEFAULT_N_LEVELS, FluxBias,
                        FluxoniumParams, _as_bias)

TWO_PI = 2.0 * math.pi

TABLE_POINTS = 200


@dataclass(frozen=True)
class FluxPulse:
    """Raised-cosine flux ramp from base_flux to base_flux + delta_flux over
    rise_time, then flat hold."""

    base_flux: FluxBias
    delta_flux: float
    rise_time: float
    hold_time: float
    sample_dt: float

    def flux_at(self, t):
        """Phi_ext(t)/Phi_0 for scalar or array t (t < 0 clamps to base)."""
        t = np.asarray(t, dtype=float)
        base = self.base_flux.phi
        if self.rise_time == 0.0 or self.delta_flux == 0.0:
            ramp = np.where(t > 0, self.delta_flux, 0.0)
        else:
            x = np.clip(t / self.rise_time, 0.0, 1.0)
            ramp = self.delta_flux * (1.0 - np.cos(np.pi * x)) / 2.0
        out = base + ramp
        return float(out) if out.ndim == 0 else out

    @property
    def duration(self) -> float:
        return self.rise_time + self.hold_time

    @property
    def hold_flux(self) -> float:
        return self.base_flux.phi + self.delta_flux


def make_flux_pulse(base, delta: float, rise_time: float, hold_time: float,
                    dt: float) -> FluxPulse:
    """Validated constructor for :class:`FluxPulse`."""
    base = _as_bias(base)
    if not np.isfinite(delta):
        raise ValueError("delta_flux must be finite")
    if rise_time < 0 or hold_time < 0:
        raise ValueError("rise_time and hold_time must be >= 0")
    if dt <= 0:
        raise ValueError("sample_dt must be > 0")
    if rise_time > 0 and delta != 0 and dt >= rise_time / 4:
        raise ResolutionError(
            f"sample_dt={dt:g} s cannot resolve rise_time={rise_time:g} s "
            "(need dt < rise_time/4)")
    return FluxPulse(base_flux=base, delta_flux=float(delta),
                     rise_time=float(rise_time), hold_time=float(hold_time),
                     sample_dt=float(dt))


@dataclass(frozen=True)
class DriveSpec:
    """Readout tone: frequency, target mean photon number and the derived
    drive amplitude epsilon (rad/s)."""

    omega_ro: float
    n_bar: float
    epsilon: float

    def __post_init__(self):
        if self.n_bar < 0 or self.epsilon < 0:
            raise ValueError("n_bar and epsilon must be >= 0")


def drive_from_photons(n_bar: float, delta_plus: float, delta_minus: float,
                       kappa: float) -> float:
    """Drive amplitude giving a state-averaged steady photon number n_bar:
    epsilon = sqrt(2*n_bar / [(Delta+^2 + kappa^2/4)^-1 + (Delta-^2 + kappa^2/4)^-1]).
    """
    if n_bar < 0:
        raise ValueError("n_bar must be >= 0")
    if kappa <= 0:
        raise ValueError("kappa must be > 0")
    denom = (1.0 / (delta_plus ** 2 + kappa ** 2 / 4.0)
             + 1.0 / (delta_minus ** 2 + kappa ** 2 / 4.0))
    return math.sqrt(2.0 * n_bar / denom)


@dataclass(frozen=True)
class DispersiveTable:
    """chi0/chi1 sampled on a flux grid for fast interpolation along a pulse.

    Grid points falling inside the resonance guard are recorded in
    ``flags`` (index, ResonanceFlag) and carry NaN pulls.
    """

    flux: np.ndarray
    chi0: np.ndarray
    chi1: np.ndarray
    flags: tuple

    def __post_init__(self):
        for name in ("flux", "chi0", "chi1"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def build(cls, params: FluxoniumParams, flux_lo: float, flux_hi: float,
              n_points: int = TABLE_POINTS, n_levels: int = DEFAULT_N_LEVELS,
              basis_size: int = DEFAULT_BASIS_SIZE,
              guard: float = RESONANCE_GUARD) -> "DispersiveTable":
        lo, hi = float(min(flux_lo, flux_hi)), float(max(flux_lo, flux_hi))
        if lo == hi:
            grid = np.array([lo])
        else:
            grid = np.linspace(lo, hi, n_points)
        c0 = np.empty(grid.size)
        c1 = np.empty(grid.size)
        flags = []
        for k, phi in enumerate(grid):
            try:
                c0[k], c1[k] = qubit_pulls(params, phi, n_levels=n_levels,
                                           basis_size=basis_size, guard=guard,
                                           check_convergence=False)
            except DivergenceProximityError as exc:
                c0[k] = c1[k] = float("nan")
                flags.append((k, ResonanceFlag(
                    flux=FluxBias(float(phi)), transition=exc.transition,
                    harmonic=1, detuning=exc.detuning)))
        return cls(flux=grid, chi0=c0, chi1=c1, flags=tuple(flags))

    def pulls_at(self, phi):
        """Linearly interpolated (chi0, chi1) at flux value(s) phi."""
        if self.flux.size == 1:
            phi = np.asarray(phi, dtype=float)
            ones = np.ones_like(phi)
            return self.chi0[0] * ones, self.chi1[0] * ones
        return (np.interp(phi, self.flux, self.chi0),
                np.interp(phi, self.flux, self.chi1))


@dataclass(frozen=True)
class CavityTrajectory:
    """Coherent amplitudes and output fields for both qubit states on a
    shared time grid."""

    time_grid: np.ndarray
    alpha0: np.ndarray
    alpha1: np.ndarray
    alpha_out0: np.ndarray
    alpha_out1: np.ndarray
    drive: DriveSpec
    kappa: float

    def __post_init__(self):
        for name in ("time_grid", "alpha0", "alpha1", "alpha_out0",
                     "alpha_out1"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.time_grid.size
        for name in ("alpha0", "alpha1", "alpha_out0", "alpha_out1"):
            if getattr(self, name).size != n:
                raise ValueError("trajectory arrays must share the time grid")

    @property
    def alpha_in(self) -> float:
        return -self.drive.epsilon / math.sqrt(self.kappa)


def detunings_at(params: FluxoniumParams, table: DispersiveTable, phi,
                 omega_ro: float):
    """(Delta_plus, Delta_minus) at flux value(s) phi: mean dressed detuning
    +/- chi, with + belonging to qubit state |1>."""
    c0, c1 = table.pulls_at(phi)
    mean = params.omega_r_bare + (c0 + c1) / 2.0 - omega_ro
    chi = (c1 - c0) / 2.0
    return mean + chi, mean - chi


def drive_for_pulse(params: FluxoniumParams, pulse: FluxPulse, n_bar: float,
                    omega_ro: float, table: DispersiveTable) -> DriveSpec:
    """DriveSpec whose epsilon targets n_bar photons at the pulse's hold
    point (equals the base point when delta_flux = 0)."""
    dp, dm = detunings_at(params, table, pulse.hold_flux, omega_ro)
    eps = drive_from_photons(n_bar, float(dp), float(dm), params.kappa)
    return DriveSpec(omega_ro=omega_ro, n_bar=float(n_bar), epsilon=eps)


def integrate_cavity(params: FluxoniumParams, pulse: FluxPulse,
                     drive: DriveSpec, duration: float, dt: float,
                     table: DispersiveTable | None = None,
                     n_levels: int = DEFAULT_N_LEVELS) -> CavityTrajectory:
    """RK4-integrate the cavity amplitude for both qubit states from
    alpha(0) = 0 under the pulse's time-dependent detunings."""
    if duration <= 0:
        raise ValueError("duration must be > 0")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if table is None:
        table = DispersiveTable.build(params, pulse.base_flux.phi,
                                      pulse.hold_flux, n_levels=n_levels)
    if table.flags:
        _, flag = table.flags[0]
        raise DivergenceProximityError(
            f"flux excursion crosses the resonance guard at "
            f"phi={flag.flux.phi:.6f} (transition {flag.transition})",
            flux=flag.flux, transition=flag.transition,
            detuning=flag.detuning)

    n_steps = int(round(duration / dt))
    t = np.arange(n_steps + 1) * dt

    # step-size sanity: resolve both the linewidth and the fastest rotation
    dp_b, dm_b = detunings_at(params, table, pulse.base_flux.phi,
                              drive.omega_ro)
    dp_h, dm_h = detunings_at(params, table, pulse.hold_flux, drive.omega_ro)
    w_max = max(abs(float(x)) for x in (dp_b, dm_b, dp_h, dm_h))
    dt_max = min(1.0 / params.kappa,
                 TWO_PI / w_max if w_max > 0 else np.inf) / 20.0
    if dt > dt_max:
        raise ResolutionError(
            f"dt={dt:g} s too coarse; need dt <= {dt_max:.3g} s for "
            "kappa and the largest detuning")
    if pulse.rise_time > 0 and pulse.delta_flux != 0 and dt >= pulse.rise_time / 4:
        raise ResolutionError(
            f"dt={dt:g} s cannot resolve rise_time={pulse.rise_time:g} s")

    phi_t = pulse.flux_at(t)
    phi_h = pulse.flux_at(t + dt / 2.0)
    dp_t, dm_t = detunings_at(params, table, phi_t, drive.omega_ro)
    dp_m, dm_m = detunings_at(params, table, phi_h, drive.omega_ro)

    eps = drive.epsilon
    kappa = params.kappa
    alpha0 = np.empty(n_steps + 1, dtype=complex)
    alpha1 = np.empty(n_steps + 1, dtype=complex)
    alpha0[0] = alpha1[0] = 0.0
    for state, (d_t, d_m, out) in ((0, (dm_t, dm_m, alpha0)),
                                   (1, (dp_t, dp_m, alpha1))):
        a = 0.0 + 0.0j
        lam_t = 1j * d_t + kappa / 2.0
        lam_m = 1j * d_m + kappa / 2.0
        for n in range(n_steps):
            k1 = -lam_t[n] * a + eps
            k2 = -lam_m[n] * (a + dt / 2.0 * k1) + eps
            k3 = -lam_m[n] * (a + dt / 2.0 * k2) + eps
            k4 = -lam_t[n + 1] * (a + dt * k3) + eps
            a = a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[n + 1] = a

    alpha_in = -eps / math.sqrt(kappa)
    return CavityTrajectory(
        time_grid=t, alpha0=alpha0, alpha1=alpha1,
        alpha_out0=alpha_in + math.sqrt(kappa) * alpha0,
        alpha_out1=alpha_in + math.sqrt(kappa) * alpha1,
        drive=drive, kappa=kappa)


@dataclass(frozen=True)
class SnrCurve:
    """SNR and SNR-limited error vs. integration time."""

    tau: np.ndarray
    snr: np.ndarray
    err_snr_limited: np.ndarray

    def __post_init__(self):
        for name in ("tau", "snr", "err_snr_limited"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def snr_at(self, tau):
        return np.interp(tau, self.tau, self.snr)

    def err_at(self, tau):
        return np.interp(tau, self.tau, self.err_snr_limited)


def snr_limited_error(snr):
    """Discrimination error implied by a given SNR: erfc(snr/2)/2."""
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("snr must be >= 0")
    out = 0.5 * erfc(snr / 2.0)
    return float(out) if out.ndim == 0 else out


def snr_vs_time(traj: CavityTrajectory, eta: float, noise_norm: float = 1.0,
                acquisition_offset: float = 0.0) -> SnrCurve:
    """Boxcar SNR(tau) from the output-field difference of a trajectory.

    ``acquisition_offset`` shifts the reported tau axis (the integration
    window is unchanged); it models the dead time between trigger and the
    first informative sample in the experimental reference curves.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if noise_norm <= 0:
        raise ValueError("noise_norm must be > 0")
    t = traj.time_grid
    s = traj.alpha_out1 - traj.alpha_out0
    dt = np.diff(t)
    integral = np.concatenate(([0.0], np.cumsum((s[1:] + s[:-1]) / 2.0 * dt)))
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = noise_norm * np.sqrt(2.0 * eta / t) * np.abs(integral)
    snr[0] = 0.0
    return SnrCurve(tau=t + acquisition_offset, snr=snr,
                    err_snr_limited=snr_limited_error(snr))
