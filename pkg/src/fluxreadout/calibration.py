"""Measurement-efficiency calibration arithmetic and supporting fits.

The efficiency follows from two fits against the readout drive amplitude
(in DAC volts): the SNR slope SNR = a*eps and the measurement-induced
dephasing Gaussian |rho01(eps)| = A*exp(-eps^2/(2*sigma^2)); then
eta = a^2*sigma^2.  The DAC amplitude converts to photon number via
n_bar = eps^2*kappa/(32*sigma^2*chi^2*tau_total).  Also included: Ramsey
cosine fits, Lorentzian linewidth fits and DC flux-crosstalk compensation.
"""
from __future__ import annotations

from dataclasses import dataclass
import csv
import json
import math
import warnings

import numpy as np
from scipy.optimize import curve_fit

from .errors import FitError, SingularMatrixError

# condition number above which crosstalk inversion is refused
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class EfficiencyFit:
    """SNR-per-volt slope, dephasing width and the implied efficiency."""

    a: float
    sigma_v: float
    eta: float

    def __post_init__(self):
        if self.eta != self.a ** 2 * self.sigma_v ** 2:
            raise ValueError("eta must equal a^2 * sigma_v^2")


@dataclass(frozen=True)
class PhotonConversion:
    """DAC-amplitude to photon-number conversion at the calibration point."""

    epsilon_v: float
    kappa: float
    chi: float
    sigma_v: float
    tau_total: float
    tau_pulse: float
    n_bar_total: float
    n_bar_active: float


@dataclass(frozen=True)
class CrosstalkMatrix:
    """Linear map from bias-channel settings to flux at each loop."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("crosstalk matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.m))


def read_xy_csv(path):
    """Two-column (x, y) CSV with an optional header row."""
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                continue  # header
            xs.append(x)
            ys.append(y)
    if not xs:
        raise FitError(f"no numeric rows in {path}")
    return np.array(xs), np.array(ys)


def fit_snr_slope(amplitudes, snr) -> float:
    """Least-squares slope of SNR = a*eps through the origin."""
    x = np.asarray(amplitudes, dtype=float)
    y = np.asarray(snr, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise ValueError("need >= 2 (amplitude, snr) pairs")
    sxx = float(np.dot(x, x))
    if sxx == 0.0:
        raise FitError("all amplitudes are zero; slope undefined")
    return float(np.dot(x, y) / sxx)


def fit_coherence_gaussian(amplitudes, coherence) -> float:
    """Width sigma of |rho01(eps)| = A*exp(-eps^2/(2*sigma^2))."""
    x = np.asarray(amplitudes, dtype=float)
    y = np.asarray(coherence, dtype=float)
    if x.size < 3 or x.size != y.size:
        raise ValueError("need >= 3 (amplitude, coherence) pairs")
    if np.any(y <= 0):
        raise ValueError("coherence values must be positive")
    order = np.argsort(np.abs(x))
    if y[order[-1]] >= y[order[0]]:
        raise FitError("coherence does not decay with amplitude")

    def model(eps, amp, sigma):
        return amp * np.exp(-eps ** 2 / (2.0 * sigma ** 2))

    # half-decay heuristic for the initial width
    span = np.abs(x).max()
    below = np.abs(x)[y < y[order[0]] * 0.607]
    s0 = float(below.min()) if below.size else span / 2.0
    try:
        popt, _ = curve_fit(model, x, y, p0=(float(y[order[0]]), s0),
                            maxfev=20000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"coherence gaussian fit failed: {exc}") from exc
    sigma = float(abs(popt[1]))
    if not np.isfinite(sigma) or sigma == 0.0:
        raise FitError("degenerate coherence width")
    return sigma


@dataclass(frozen=True)
class RamseyFit:
    """A*cos(phi + phi0) + B fit of Ramsey oscillations."""

    amplitude: float
    phase_offset: float
    offset: float

    @property
    def coherence(self) -> float:
        return self.amplitude / 2.0


def fit_ramsey(phases, sigma_z) -> RamseyFit:
    """Linear least-squares cosine fit of <sigma_z>(phi)."""
    phi = np.asarray(phases, dtype=float)
    y = np.asarray(sigma_z, dtype=float)
    if phi.size != y.size or phi.size < 3:
        raise ValueError("need >= 3 (phase, sigma_z) pairs")
    if phi.max() - phi.min() < 2.0 * math.pi:
        raise ValueError("phases must span at least 2*pi")
    # A cos(phi + phi0) + B = a cos(phi) + b sin(phi) + B, linear in (a, b, B)
    design = np.column_stack([np.cos(phi), np.sin(phi), np.ones_like(phi)])
    (a, b, off), *_ = np.linalg.lstsq(design, y, rcond=None)
    amp = math.hypot(a, b)
    resid = y - design @ np.array([a, b, off])
    noise = float(np.std(resid))
    scale = max(float(np.max(np.abs(y))), 1e-300)
    if amp <= 3.0 * noise / math.sqrt(phi.size) + 1e-12 * scale:
        warnings.warn("Ramsey data nearly flat; amplitude consistent with 0",
                      stacklevel=2)
    return RamseyFit(amplitude=float(amp), phase_offset=float(math.atan2(-b, a)),
                     offset=float(off))


def efficiency(a: float, sigma_v: float) -> EfficiencyFit:
    """eta = a^2 * sigma_v^2."""
    if not (np.isfinite(a) and np.isfinite(sigma_v)):
        raise ValueError("a and sigma_v must be finite")
    eta = a ** 2 * sigma_v ** 2
    if not 0.0 <= eta <= 1.0:
        warnings.warn(f"efficiency {eta:.4g} outside [0, 1]", stacklevel=2)
    return EfficiencyFit(a=float(a), sigma_v=float(sigma_v), eta=float(eta))


def photons_from_dac(epsilon_v: float, kappa: float, chi: float,
                     sigma_v: float, tau_total: float,
                     tau_pulse: float) -> PhotonConversion:
    """n_bar_total = eps^2*kappa/(32*sigma^2*chi^2*tau_total); the active
    photon number rescales by tau_total/tau_pulse."""
    if chi == 0.0:
        raise ZeroDivisionError(
            "chi = 0: DAC-to-photon conversion is meaningless without "
            "dispersive coupling")
    for name, v in (("kappa", kappa), ("sigma_v", sigma_v),
                    ("tau_total", tau_total), ("tau_pulse", tau_pulse)):
        if not v > 0:
            raise ValueError(f"{name} must be > 0, got {v}")
    if epsilon_v < 0:
        raise ValueError("epsilon_v must be >= 0")
    n_total = (epsilon_v ** 2 * kappa
               / (32.0 * sigma_v ** 2 * chi ** 2 * tau_total))
    return PhotonConversion(
        epsilon_v=float(epsilon_v), kappa=float(kappa), chi=float(chi),
        sigma_v=float(sigma_v), tau_total=float(tau_total),
        tau_pulse=float(tau_pulse), n_bar_total=float(n_total),
        n_bar_active=float(n_total * tau_total / tau_pulse))


def crosstalk_compensate(m: CrosstalkMatrix, target_flux) -> np.ndarray:
    """Bias vector b with m @ b = target_flux."""
    target = np.asarray(target_flux, dtype=float)
    cond = m.condition_number
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularMatrixError(
            f"crosstalk matrix is singular or ill-conditioned "
            f"(condition number {cond:.3g})", condition_number=cond)
    try:
        return np.linalg.solve(m.m, target)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"crosstalk inversion failed: {exc}",
                                  condition_number=cond) from exc


def fit_linewidth(freqs, transmission_mag) -> float:
    """Full width at half maximum of a Lorentzian peak or dip."""
    f = np.asarray(freqs, dtype=float)
    y = np.asarray(transmission_mag, dtype=float)
    if f.size < 5 or f.size != y.size:
        raise ValueError("need >= 5 (frequency, magnitude) pairs")
    base = (y[0] + y[-1]) / 2.0
    up, down = y.max() - base, base - y.min()
    is_peak = up >= down
    k_ext = int(np.argmax(y) if is_peak else np.argmin(y))
    if k_ext in (0, f.size - 1):
        raise FitError("no interior extremum: data do not bracket a resonance")

    def model(x, b, amp, f0, hw):
        return b + amp * hw ** 2 / ((x - f0) ** 2 + hw ** 2)

    amp0 = y[k_ext] - base  # negative for a dip
    half = base + amp0 / 2.0
    crossed = f[np.abs(y - half) < abs(amp0) / 2.0]
    hw0 = (crossed.max() - crossed.min()) / 2.0 if crossed.size > 1 \
        else (f[-1] - f[0]) / 10.0
    try:
        popt, _ = curve_fit(model, f, y, p0=(base, amp0, f[k_ext], hw0),
                            maxfev=20000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"lorentzian fit failed: {exc}") from exc
    hw = abs(float(popt[3]))
    if hw == 0.0 or not np.isfinite(hw):
        raise FitError("degenerate lorentzian width")
    return 2.0 * hw


def write_report(path, *, a, sigma_v, eta, n_bar_total, n_bar_active, kappa):
    """Calibration report JSON (keys fixed by docs/calibration_report.schema.json)."""
    report = {"a": a, "sigma_v": sigma_v, "eta": eta,
              "n_bar_total": n_bar_total, "n_bar_active": n_bar_active,
              "kappa": kappa}
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
