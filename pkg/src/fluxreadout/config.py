"""TOML experiment configuration.

All frequencies in config files are plain Hz (keys suffixed ``_hz``); they
are converted to angular units on load.  Times carry their unit in the key
name (``_ns``, ``_us``).  Flux grids are either explicit lists or inline
tables ``{start = ..., stop = ..., num = ...}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import importlib.resources
import math
try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from .errors import ConfigError
from .fluxonium import FluxoniumParams

TWO_PI = 2.0 * math.pi

REFERENCE_CONFIG_NAME = "reference_device.toml"


def default_config_path():
    """Path of the packaged reference-device config."""
    return importlib.resources.files("fluxreadout.data") / REFERENCE_CONFIG_NAME


def _grid(value, where):
    """Flux/parameter grid from a list or a start/stop/num table."""
    if isinstance(value, (list, tuple)):
        arr = np.asarray(value, dtype=float)
        if arr.size == 0:
            raise ConfigError(f"{where}: grid must be nonempty")
        return arr
    if isinstance(value, dict):
        try:
            start, stop, num = value["start"], value["stop"], int(value["num"])
        except KeyError as exc:
            raise ConfigError(f"{where}: grid table needs start/stop/num "
                              f"(missing {exc})") from exc
        if num < 1:
            raise ConfigError(f"{where}: num must be >= 1")
        return np.linspace(float(start), float(stop), num)
    raise ConfigError(f"{where}: expected list or start/stop/num table, "
                      f"got {type(value).__name__}")


def _get(section, key, where, default=None, required=False):
    if key in section:
        return section[key]
    if required:
        raise ConfigError(f"{where}: missing required key '{key}'")
    return default


@dataclass(frozen=True)
class PulseConfig:
    base_flux: float = 0.5
    delta_flux: float = 0.1567
    rise_time: float = 50e-9
    hold_time: float = 450e-9
    dt: float = 0.5e-9


@dataclass(frozen=True)
class DriveConfig:
    n_bar: float = 75.0
    omega_ro: float | None = None  # angular; None = computed default


@dataclass(frozen=True)
class ReadoutConfig:
    modes: tuple = ("fpa", "ss")
    duration: float = 500e-9
    eta: float = 0.0604
    noise_norm: float = 1.0
    acquisition_offset: float = 40e-9
    tau_step: float = 10e-9
    n_shots: int = 0


@dataclass(frozen=True)
class NoiseConfig:
    p_init0: float = 0.0
    p_init1: float = 0.0
    t1: float = math.inf


@dataclass(frozen=True)
class SweepConfig:
    delta_flux: np.ndarray = field(
        default_factory=lambda: np.arange(0.10, 0.1701, 0.01))
    n_bar: np.ndarray = field(
        default_factory=lambda: np.array([25.0, 50.0, 75.0]))
    tau: float = 200e-9  # reported tau (includes acquisition offset)
    n_shots: int = 5000


@dataclass(frozen=True)
class CalibrateConfig:
    snr_csv: str = ""
    coherence_csv: str = ""
    ramsey_csv: str = ""
    linewidth_csv: str = ""
    epsilon_v: float = 0.4
    tau_total: float = 3.79e-6
    tau_pulse: float = 2.27e-6
    chi: float | None = None    # angular; None = device sweet-spot value
    kappa: float | None = None  # angular; None = linewidth fit or device card


@dataclass(frozen=True)
class ExperimentConfig:
    device: FluxoniumParams
    spectrum_flux: np.ndarray
    spectrum_n_levels: int
    chi_flux: np.ndarray
    chi_n_levels: int
    pulse: PulseConfig
    drive: DriveConfig
    readout: ReadoutConfig
    noise: NoiseConfig
    sweep: SweepConfig
    calibrate: CalibrateConfig
    seed: int


def _device(section):
    where = "[device]"
    try:
        return FluxoniumParams(
            e_j=TWO_PI * float(_get(section, "e_j_hz", where, 3.82e9)),
            e_c=TWO_PI * float(_get(section, "e_c_hz", where, 0.865e9)),
            e_l=TWO_PI * float(_get(section, "e_l_hz", where, 0.822e9)),
            g=TWO_PI * float(_get(section, "g_hz", where, 37.2e6)),
            omega_r_bare=TWO_PI * float(
                _get(section, "omega_r_hz", where, 5.175e9)),
            kappa=TWO_PI * float(_get(section, "kappa_hz", where, 6.04e6)))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path=None, *, seed=None, n_shots=None) -> ExperimentConfig:
    """Load and validate a TOML experiment config.

    ``seed`` and ``n_shots`` override the corresponding file values (used by
    the CLI flags).  Any invalid field raises :class:`ConfigError` naming the
    section and key.
    """
    if path is None:
        raw = tomllib.loads(default_config_path().read_text())
    else:
        with open(path, "rb") as fh:
            try:
                raw = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc

    device = _device(raw.get("device", {}))

    sp = raw.get("spectrum", {})
    spectrum_flux = _grid(_get(sp, "flux", "[spectrum]", [0.5]), "[spectrum]")
    spectrum_n_levels = int(_get(sp, "n_levels", "[spectrum]", 12))

    ch = raw.get("chi", {})
    chi_flux = _grid(_get(ch, "flux", "[chi]",
                          {"start": 0.45, "stop": 0.75, "num": 301}), "[chi]")
    chi_n_levels = int(_get(ch, "n_levels", "[chi]", 12))

    pu = raw.get("pulse", {})
    pulse = PulseConfig(
        base_flux=float(_get(pu, "base_flux", "[pulse]", 0.5)),
        delta_flux=float(_get(pu, "delta_flux", "[pulse]", 0.1567)),
        rise_time=1e-9 * float(_get(pu, "rise_time_ns", "[pulse]", 50.0)),
        hold_time=1e-9 * float(_get(pu, "hold_time_ns", "[pulse]", 450.0)),
        dt=1e-9 * float(_get(pu, "dt_ns", "[pulse]", 0.5)))
    if pulse.dt <= 0:
        raise ConfigError("[pulse]: dt_ns must be > 0")
    if pulse.rise_time < 0 or pulse.hold_time < 0:
        raise ConfigError("[pulse]: rise_time_ns and hold_time_ns must be >= 0")

    dr = raw.get("drive", {})
    omega_ro_hz = _get(dr, "omega_ro_hz", "[drive]")
    drive = DriveConfig(
        n_bar=float(_get(dr, "n_bar", "[drive]", 75.0)),
        omega_ro=TWO_PI * float(omega_ro_hz) if omega_ro_hz is not None
        else None)
    if drive.n_bar < 0:
        raise ConfigError("[drive]: n_bar must be >= 0")

    ro = raw.get("readout", {})
    modes = tuple(_get(ro, "modes", "[readout]", ["fpa", "ss"]))
    for m in modes:
        if m not in ("fpa", "ss"):
            raise ConfigError(f"[readout]: unknown mode {m!r}")
    readout = ReadoutConfig(
        modes=modes,
        duration=1e-9 * float(_get(ro, "duration_ns", "[readout]", 500.0)),
        eta=float(_get(ro, "eta", "[readout]", 0.0604)),
        noise_norm=float(_get(ro, "noise_norm", "[readout]", 1.0)),
        acquisition_offset=1e-9 * float(
            _get(ro, "acquisition_offset_ns", "[readout]", 40.0)),
        tau_step=1e-9 * float(_get(ro, "tau_step_ns", "[readout]", 10.0)),
        n_shots=int(_get(ro, "n_shots", "[readout]", 0)))
    if not 0.0 < readout.eta <= 1.0:
        raise ConfigError("[readout]: eta must be in (0, 1]")
    if readout.noise_norm <= 0:
        raise ConfigError("[readout]: noise_norm must be > 0")
    if readout.n_shots < 0:
        raise ConfigError("[readout]: n_shots must be >= 0")
    if readout.duration <= 0 or readout.tau_step <= 0:
        raise ConfigError("[readout]: duration_ns and tau_step_ns must be > 0")

    no = raw.get("noise", {})
    t1_us = float(_get(no, "t1_us", "[noise]", math.inf))
    noise = NoiseConfig(
        p_init0=float(_get(no, "p_init0", "[noise]", 0.0)),
        p_init1=float(_get(no, "p_init1", "[noise]", 0.0)),
        t1=1e-6 * t1_us if math.isfinite(t1_us) else math.inf)
    for name in ("p_init0", "p_init1"):
        p = getattr(noise, name)
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"[noise]: {name} must be in [0, 1]")
    if not noise.t1 > 0:
        raise ConfigError("[noise]: t1_us must be > 0")

    sw = raw.get("sweep", {})
    sweep = SweepConfig(
        delta_flux=_grid(_get(sw, "delta_flux", "[sweep]",
                              {"start": 0.10, "stop": 0.17, "num": 8}),
                         "[sweep]"),
        n_bar=_grid(_get(sw, "n_bar", "[sweep]", [25.0, 50.0, 75.0]),
                    "[sweep]"),
        tau=1e-9 * float(_get(sw, "tau_ns", "[sweep]", 200.0)),
        n_shots=int(_get(sw, "n_shots", "[sweep]", 5000)))
    if sweep.tau <= 0 or sweep.n_shots < 1:
        raise ConfigError("[sweep]: tau_ns must be > 0 and n_shots >= 1")

    ca = raw.get("calibrate", {})
    chi_hz = _get(ca, "chi_hz", "[calibrate]")
    kappa_hz = _get(ca, "kappa_hz", "[calibrate]")
    calibrate = CalibrateConfig(
        snr_csv=str(_get(ca, "snr_csv", "[calibrate]", "")),
        coherence_csv=str(_get(ca, "coherence_csv", "[calibrate]", "")),
        ramsey_csv=str(_get(ca, "ramsey_csv", "[calibrate]", "")),
        linewidth_csv=str(_get(ca, "linewidth_csv", "[calibrate]", "")),
        epsilon_v=float(_get(ca, "epsilon_v", "[calibrate]", 0.4)),
        tau_total=1e-6 * float(_get(ca, "tau_total_us", "[calibrate]", 3.79)),
        tau_pulse=1e-6 * float(_get(ca, "tau_pulse_us", "[calibrate]", 2.27)),
        chi=TWO_PI * float(chi_hz) if chi_hz is not None else None,
        kappa=TWO_PI * float(kappa_hz) if kappa_hz is not None else None)

    cfg_seed = int(raw.get("seed", 0))
    if seed is not None:
        cfg_seed = int(seed)
    if n_shots is not None:
        readout = ReadoutConfig(
            modes=readout.modes, duration=readout.duration, eta=readout.eta,
            noise_norm=readout.noise_norm,
            acquisition_offset=readout.acquisition_offset,
            tau_step=readout.tau_step, n_shots=int(n_shots))
        sweep = SweepConfig(delta_flux=sweep.delta_flux, n_bar=sweep.n_bar,
                            tau=sweep.tau, n_shots=max(int(n_shots), 1))

    return ExperimentConfig(
        device=device, spectrum_flux=spectrum_flux,
        spectrum_n_levels=spectrum_n_levels, chi_flux=chi_flux,
        chi_n_levels=chi_n_levels, pulse=pulse, drive=drive, readout=readout,
        noise=noise, sweep=sweep, calibrate=calibrate, seed=cfg_seed)
