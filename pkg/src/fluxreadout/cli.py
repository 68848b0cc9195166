"""Command-line front end: spectrum | chi | readout | calibrate | sweep.

Every command reads a TOML config (packaged reference-device defaults when
--config is omitted), writes CSV/JSON into --out, and is deterministic for a
given config and seed.  Frequencies are emitted in plain Hz with ``_hz``
column suffixes.  Exit codes: 0 ok, 1 compute error, 2 config/usage error.

The sweep fans out over a process pool; set FLUXREADOUT_WORKERS to cap the
worker count.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import calibration
from .config import ExperimentConfig, load_config
from .dispersive import chi_vs_flux, dispersive_point
from .dynamics import (DispersiveTable, drive_for_pulse, integrate_cavity,
                       make_flux_pulse, snr_vs_time)
from .errors import (ConfigError, DivergenceProximityError, FluxReadoutError,
                     ResolutionError)
from .fluxonium import spectrum_vs_flux
from .shots import NoiseModel, assignment_error, fit_gaussians, sample_shots

TWO_PI = 2.0 * math.pi

WORKERS_ENV = "FLUXREADOUT_WORKERS"


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _maybe_plot(out_dir, name, curves, xlabel, ylabel, logy=False):
    """curves: list of (x, y, label)."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ConfigError(
            "--svg requires matplotlib (pip install fluxreadout[plot])"
        ) from exc
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for x, y, label in curves:
        ax.plot(x, y, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if logy:
        ax.set_yscale("log")
    if len(curves) > 1:
        ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, name)
    fig.savefig(path)
    plt.close(fig)
    return path


def cmd_spectrum(cfg: ExperimentConfig, out_dir, svg=False):
    results = spectrum_vs_flux(cfg.device, cfg.spectrum_flux,
                               n_levels=cfg.spectrum_n_levels)
    n_levels = cfg.spectrum_n_levels
    header = ["flux"] + [f"omega_0{j}_hz" for j in range(1, n_levels)]
    rows = [[_fmt(r.flux.phi)] + [_fmt(r.energies[j] / TWO_PI)
                                  for j in range(1, n_levels)]
            for r in results]
    path = os.path.join(out_dir, "spectrum.csv")
    _write_csv(path, header, rows)
    if svg:
        flux = [r.flux.phi for r in results]
        curves = [(flux, [r.energies[j] / TWO_PI / 1e9 for r in results],
                   f"0-{j}") for j in range(1, min(n_levels, 7))]
        _maybe_plot(out_dir, "spectrum.svg", curves, "flux (Phi_ext/Phi_0)",
                    "transition frequency (GHz)")
    return [path]


def cmd_chi(cfg: ExperimentConfig, out_dir, svg=False):
    points = chi_vs_flux(cfg.device, np.sort(cfg.chi_flux),
                         n_levels=cfg.chi_n_levels)
    header = ["flux", "chi_hz", "omega_r0_hz", "omega_r1_hz",
              "divergence_flag"]
    rows = [[_fmt(p.flux.phi), _fmt(p.chi / TWO_PI),
             _fmt(p.omega_r0 / TWO_PI), _fmt(p.omega_r1 / TWO_PI),
             "1" if p.flagged else "0"] for p in points]
    path = os.path.join(out_dir, "chi.csv")
    _write_csv(path, header, rows)
    if svg:
        flux = [p.flux.phi for p in points]
        chi_mhz = [p.chi / TWO_PI / 1e6 for p in points]
        _maybe_plot(out_dir, "chi.svg", [(flux, chi_mhz, "chi")],
                    "flux (Phi_ext/Phi_0)", "chi/2pi (MHz)")
    return [path]


def _mode_pulse(cfg: ExperimentConfig, mode: str):
    p = cfg.pulse
    delta = p.delta_flux if mode == "fpa" else 0.0
    rise = p.rise_time if mode == "fpa" else 0.0
    return make_flux_pulse(p.base_flux, delta, rise,
                           max(cfg.readout.duration - rise, 0.0), p.dt)


def default_omega_ro(cfg: ExperimentConfig, table: DispersiveTable) -> float:
    """omega_r0 + chi evaluated at the base (sweet-spot) flux."""
    c0, c1 = table.pulls_at(cfg.pulse.base_flux)
    return float(cfg.device.omega_r_bare + c0 + (c1 - c0) / 2.0)


def _readout_mode(cfg: ExperimentConfig, mode: str, table: DispersiveTable,
                  omega_ro: float, seed: int):
    ro = cfg.readout
    pulse = _mode_pulse(cfg, mode)
    drive = drive_for_pulse(cfg.device, pulse, cfg.drive.n_bar, omega_ro,
                            table)
    traj = integrate_cavity(cfg.device, pulse, drive, ro.duration,
                            cfg.pulse.dt, table=table)
    curve = snr_vs_time(traj, ro.eta, noise_norm=ro.noise_norm,
                        acquisition_offset=ro.acquisition_offset)
    # report on a coarse tau grid (integration times at tau_step multiples)
    n_rows = int(math.floor(ro.duration / ro.tau_step))
    tau_int = np.arange(1, n_rows + 1) * ro.tau_step
    tau_rep = tau_int + ro.acquisition_offset
    snr = np.interp(tau_int, traj.time_grid, curve.snr)
    err = np.interp(tau_int, traj.time_grid, curve.err_snr_limited)
    err_assign = None
    if ro.n_shots > 0:
        noise = NoiseModel(p_init0=cfg.noise.p_init0,
                           p_init1=cfg.noise.p_init1, t1=cfg.noise.t1,
                           eta=ro.eta)
        err_assign = np.empty(tau_int.size)
        for k, tau in enumerate(tau_int):
            shots = sample_shots(traj, noise, tau, ro.n_shots,
                                 seed + 7919 * k, noise_norm=ro.noise_norm)
            err_assign[k] = assignment_error(shots, fit_gaussians(shots)).error
    return tau_rep, snr, err, err_assign


def cmd_readout(cfg: ExperimentConfig, out_dir, svg=False):
    ro = cfg.readout
    span = (cfg.pulse.base_flux,
            cfg.pulse.base_flux + (cfg.pulse.delta_flux
                                   if "fpa" in ro.modes else 0.0))
    table = DispersiveTable.build(cfg.device, span[0], span[1])
    omega_ro = (cfg.drive.omega_ro if cfg.drive.omega_ro is not None
                else default_omega_ro(cfg, table))
    paths = []
    svg_curves = []
    for m_idx, mode in enumerate(ro.modes):
        tau, snr, err, err_assign = _readout_mode(
            cfg, mode, table, omega_ro, cfg.seed + 104729 * m_idx)
        header = ["tau_s", "snr", "err_snr_limited"]
        cols = [tau, snr, err]
        if err_assign is not None:
            header.append("err_assignment")
            cols.append(err_assign)
        rows = [[_fmt(c[k]) for c in cols] for k in range(tau.size)]
        path = os.path.join(out_dir, f"readout_{mode}.csv")
        _write_csv(path, header, rows)
        paths.append(path)
        svg_curves.append((tau * 1e9, np.maximum(err, 1e-12),
                           f"{mode} SNR-limited"))
        if err_assign is not None:
            svg_curves.append((tau * 1e9, np.maximum(err_assign, 1e-12),
                               f"{mode} assignment"))
    if svg:
        _maybe_plot(out_dir, "readout.svg", svg_curves, "tau (ns)",
                    "error", logy=True)
    return paths


def cmd_calibrate(cfg: ExperimentConfig, out_dir):
    ca = cfg.calibrate
    if not ca.snr_csv or not ca.coherence_csv:
        raise ConfigError(
            "[calibrate]: snr_csv and coherence_csv input files are required")
    amps, snrs = calibration.read_xy_csv(ca.snr_csv)
    a = calibration.fit_snr_slope(amps, snrs)
    camps, coh = calibration.read_xy_csv(ca.coherence_csv)
    sigma_v = calibration.fit_coherence_gaussian(camps, coh)
    eff = calibration.efficiency(a, sigma_v)
    if ca.linewidth_csv:
        freqs, mags = calibration.read_xy_csv(ca.linewidth_csv)
        kappa = calibration.fit_linewidth(freqs, mags)
    elif ca.kappa is not None:
        kappa = ca.kappa
    else:
        kappa = cfg.device.kappa
    if ca.chi is not None:
        chi = ca.chi
    else:
        chi = dispersive_point(cfg.device, cfg.pulse.base_flux).chi
    conv = calibration.photons_from_dac(ca.epsilon_v, kappa, chi, sigma_v,
                                        ca.tau_total, ca.tau_pulse)
    path = os.path.join(out_dir, "calibration_report.json")
    report = calibration.write_report(
        path, a=a, sigma_v=sigma_v, eta=eff.eta,
        n_bar_total=conv.n_bar_total, n_bar_active=conv.n_bar_active,
        kappa=kappa)
    if ca.ramsey_csv:
        phases, sz = calibration.read_xy_csv(ca.ramsey_csv)
        fit = calibration.fit_ramsey(phases, sz)
        print(f"ramsey coherence |rho01| = {fit.coherence:.6g}")
    for key in ("a", "sigma_v", "eta", "n_bar_total", "n_bar_active"):
        print(f"{key} = {report[key]:.6g}")
    return [path]


def _sweep_cell(args):
    (device, pulse_cfg, duration, dt, eta, noise_norm, offset, noise_cfg,
     omega_ro, table, delta, n_bar, tau_int, n_shots, seed) = args
    try:
        rise = pulse_cfg.rise_time if delta != 0.0 else 0.0
        pulse = make_flux_pulse(pulse_cfg.base_flux, delta, rise,
                                max(duration - rise, 0.0), dt)
        lo = min(pulse.base_flux.phi, pulse.hold_flux)
        hi = max(pulse.base_flux.phi, pulse.hold_flux)
        for _, flag in table.flags:
            if lo <= flag.flux.phi <= hi:
                raise DivergenceProximityError(
                    "cell excursion crosses a flagged resonance",
                    flux=flag.flux, transition=flag.transition,
                    detuning=flag.detuning)
        drive = drive_for_pulse(device, pulse, n_bar, omega_ro, table)
        traj = integrate_cavity(device, pulse, drive, duration, dt,
                                table=table)
        noise = NoiseModel(p_init0=noise_cfg.p_init0,
                           p_init1=noise_cfg.p_init1, t1=noise_cfg.t1,
                           eta=eta)
        shots = sample_shots(traj, noise, tau_int, n_shots, seed,
                             noise_norm=noise_norm)
        err = assignment_error(shots, fit_gaussians(shots)).error
        return delta, n_bar, err
    except (DivergenceProximityError, ResolutionError):
        return delta, n_bar, float("nan")


def cmd_sweep(cfg: ExperimentConfig, out_dir, svg=False):
    sw = cfg.sweep
    ro = cfg.readout
    tau_int = sw.tau  # sweep tau is the integration time itself
    duration = tau_int
    deltas = np.sort(sw.delta_flux)
    max_delta = max(abs(float(d)) for d in deltas)
    sign = 1.0 if float(deltas[np.argmax(np.abs(deltas))]) >= 0 else -1.0
    base = cfg.pulse.base_flux
    table = DispersiveTable.build(cfg.device, base, base + sign * max_delta)
    omega_ro = (cfg.drive.omega_ro if cfg.drive.omega_ro is not None
                else default_omega_ro(cfg, table))
    jobs = []
    for i, delta in enumerate(deltas):
        for j, n_bar in enumerate(sw.n_bar):
            seed = cfg.seed + 15485863 * (i * len(sw.n_bar) + j)
            jobs.append((cfg.device, cfg.pulse, duration, cfg.pulse.dt,
                         ro.eta, ro.noise_norm, ro.acquisition_offset,
                         cfg.noise, omega_ro, table, float(delta),
                         float(n_bar), tau_int, sw.n_shots, seed))
    workers = int(os.environ.get(WORKERS_ENV, "0")) or (os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_cell, jobs))
    else:
        results = [_sweep_cell(job) for job in jobs]
    header = ["delta_flux", "n_bar", "err_assignment"]
    rows = [[_fmt(d), _fmt(nb), _fmt(err)] for d, nb, err in results]
    path = os.path.join(out_dir, "sweep.csv")
    _write_csv(path, header, rows)
    errs = np.array([r[2] for r in results])
    if np.all(np.isnan(errs)):
        print("sweep: all cells hit the divergence guard")
    else:
        k = int(np.nanargmin(errs))
        d_best, nb_best, e_best = results[k]
        print(f"sweep argmin: delta_flux={d_best:g} n_bar={nb_best:g} "
              f"err_assignment={e_best:.6g}")
    if svg:
        x = [r[0] for r in results]
        y = [r[2] for r in results]
        _maybe_plot(out_dir, "sweep.svg", [(x, y, "assignment error")],
                    "delta_flux", "err_assignment")
    return [path]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fluxreadout",
        description="Flux-pulse-assisted fluxonium readout simulator")
    parser.add_argument("command",
                        choices=["spectrum", "chi", "readout", "calibrate",
                                 "sweep"])
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="TOML config (default: packaged reference device)")
    parser.add_argument("--out", metavar="DIR", default=".",
                        help="output directory (default: current)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--shots", type=int, default=None,
                        help="override the per-point shot count")
    parser.add_argument("--svg", action="store_true",
                        help="also write SVG plots (needs matplotlib)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = load_config(args.config, seed=args.seed, n_shots=args.shots)
        os.makedirs(args.out, exist_ok=True)
        if args.command == "spectrum":
            paths = cmd_spectrum(cfg, args.out, svg=args.svg)
        elif args.command == "chi":
            paths = cmd_chi(cfg, args.out, svg=args.svg)
        elif args.command == "readout":
            paths = cmd_readout(cfg, args.out, svg=args.svg)
        elif args.command == "calibrate":
            paths = cmd_calibrate(cfg, args.out)
        else:
            paths = cmd_sweep(cfg, args.out, svg=args.svg)
    except (ConfigError, FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FluxReadoutError as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
