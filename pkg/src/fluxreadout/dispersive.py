"""State-dependent resonator pulls and dispersive-shift diagnostics.

The resonator pull for qubit state |i> is computed from second-order
perturbation theory in the charge coupling,

    chi_i = -(xi*g)^2 * sum_{j != i} |<j|n|i>|^2 * 2*omega_ji / (omega_ji^2 - omega_r^2),

which diverges whenever a transition out of |i> crosses the resonator.
``xi`` is a fixed effective-coupling factor (COUPLING_SCALE) calibrated once
against the reference device's measured sweet-spot shift chi/2pi = 0.92 MHz;
it absorbs the renormalization of the bare charge coupling that a
fully-dressed model would produce.  The dispersive shift is
chi = (chi1 - chi0)/2 and the dressed frequencies are
omega_ri = omega_r_bare + chi_i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DivergenceProximityError
from .fluxonium import (DEFAULT_BASIS_SIZE, DEFAULT_N_LEVELS, FluxBias,
                        FluxoniumParams, SpectrumResult, _as_bias, _solve,
                        diagonalize)

TWO_PI = 2.0 * np.pi

# effective charge-coupling enhancement over the bare g; pinned by the
# reference device's sweet-spot dispersive shift (see package docs)
COUPLING_SCALE = 1.6125

# default proximity guard around |omega_ji| = omega_r (rad/s)
RESONANCE_GUARD = TWO_PI * 100e3

# default detuning window for multi-photon resonance flags (rad/s)
MIST_WINDOW = TWO_PI * 50e6


@dataclass(frozen=True)
class ResonanceFlag:
    """A qubit transition (i, j) near the m-th harmonic of the resonator."""

    flux: FluxBias
    transition: tuple[int, int]
    harmonic: int
    detuning: float

    def __post_init__(self):
        if self.harmonic < 1:
            raise ValueError("harmonic must be >= 1")
        if self.detuning < 0:
            raise ValueError("detuning must be >= 0")


@dataclass(frozen=True)
class DispersivePoint:
    """Resonator pulls and dispersive shift at one flux bias.

    ``flag`` is set (and chi values are NaN) when the point sits inside the
    resonance guard of a diverging transition.
    """

    flux: FluxBias
    chi0: float
    chi1: float
    chi: float
    omega_r0: float
    omega_r1: float
    flag: ResonanceFlag | None = None

    @property
    def flagged(self) -> bool:
        return self.flag is not None


def _pulls_from_spectrum(params: FluxoniumParams, spec: SpectrumResult,
                         guard: float):
    """(chi0, chi1) from a diagonalized spectrum; raises on guard violation."""
    wr = params.omega_r_bare
    g_eff_sq = (COUPLING_SCALE * params.g) ** 2
    e = spec.energies
    nm = spec.n_elements
    pulls = []
    for i in (0, 1):
        acc = 0.0
        for j in range(spec.n_levels):
            if j == i:
                continue
            wji = e[j] - e[i]
            if abs(abs(wji) - wr) < guard:
                raise DivergenceProximityError(
                    f"transition ({i}, {j}) detuned "
                    f"{abs(abs(wji) - wr) / TWO_PI:.3g} Hz from the resonator "
                    f"at phi={spec.flux.phi:.6f}",
                    flux=spec.flux, transition=(i, j),
                    detuning=abs(abs(wji) - wr))
            acc += nm[i, j] ** 2 * 2.0 * wji / (wji ** 2 - wr ** 2)
        pulls.append(-g_eff_sq * acc)
    return pulls[0], pulls[1]


def qubit_pulls(params: FluxoniumParams, flux, n_levels: int = DEFAULT_N_LEVELS,
                basis_size: int = DEFAULT_BASIS_SIZE,
                guard: float = RESONANCE_GUARD,
                check_convergence: bool = True) -> tuple[float, float]:
    """Second-order pulls (chi0, chi1) of the resonator at one flux bias."""
    if n_levels < 6:
        raise ValueError(f"n_levels must be >= 6, got {n_levels}")
    spec = diagonalize(params, flux, basis_size=basis_size, n_levels=n_levels,
                       check_convergence=check_convergence)
    return _pulls_from_spectrum(params, spec, guard)


def dispersive_point(params: FluxoniumParams, flux,
                     n_levels: int = DEFAULT_N_LEVELS,
                     basis_size: int = DEFAULT_BASIS_SIZE,
                     guard: float = RESONANCE_GUARD,
                     check_convergence: bool = True) -> DispersivePoint:
    """Pulls, dispersive shift and dressed frequencies at one flux bias."""
    bias = _as_bias(flux)
    chi0, chi1 = qubit_pulls(params, bias, n_levels=n_levels,
                             basis_size=basis_size, guard=guard,
                             check_convergence=check_convergence)
    return DispersivePoint(flux=bias, chi0=chi0, chi1=chi1,
                           chi=(chi1 - chi0) / 2.0,
                           omega_r0=params.omega_r_bare + chi0,
                           omega_r1=params.omega_r_bare + chi1)


def dressed_frequencies(params: FluxoniumParams, flux,
                        n_levels: int = DEFAULT_N_LEVELS) -> tuple[float, float]:
    """State-dependent dressed resonator frequencies (omega_r0, omega_r1)."""
    pt = dispersive_point(params, flux, n_levels=n_levels)
    return pt.omega_r0, pt.omega_r1


def chi_vs_flux(params: FluxoniumParams, flux_grid,
                n_levels: int = DEFAULT_N_LEVELS,
                basis_size: int = DEFAULT_BASIS_SIZE,
                guard: float = RESONANCE_GUARD) -> list[DispersivePoint]:
    """Dispersive shift on a flux grid.

    Points inside the resonance guard are returned flagged with NaN pulls
    instead of raising.  Grid points straddling a divergence (the detuning
    of some transition out of |0> or |1> changes sign between neighbors)
    are also flagged, with their finite — but untrustworthy — pulls kept.
    """
    grid = np.atleast_1d(np.asarray(flux_grid, dtype=float))
    if not np.all(np.isfinite(grid)):
        raise ValueError("flux grid must be finite")
    wr = params.omega_r_bare
    out = []
    detunings = np.empty((grid.size, 2, n_levels))
    for k, phi in enumerate(grid):
        spec = diagonalize(params, phi, basis_size=basis_size,
                           n_levels=n_levels, check_convergence=False)
        e = spec.energies
        for i in (0, 1):
            detunings[k, i] = np.abs(e - e[i]) - wr
            detunings[k, i, i] = np.inf  # no self-transition
        try:
            chi0, chi1 = _pulls_from_spectrum(params, spec, guard)
            out.append(DispersivePoint(
                flux=spec.flux, chi0=chi0, chi1=chi1, chi=(chi1 - chi0) / 2.0,
                omega_r0=wr + chi0, omega_r1=wr + chi1))
        except DivergenceProximityError as exc:
            nan = float("nan")
            out.append(DispersivePoint(
                flux=spec.flux, chi0=nan, chi1=nan, chi=nan,
                omega_r0=nan, omega_r1=nan,
                flag=ResonanceFlag(flux=spec.flux, transition=exc.transition,
                                   harmonic=1, detuning=exc.detuning)))
    # flag the endpoints of every grid cell in which a detuning changes sign
    for i in (0, 1):
        for j in range(n_levels):
            if j == i:
                continue
            f = detunings[:, i, j]
            for k in np.nonzero(np.diff(np.sign(f)) != 0)[0]:
                for kk in (k, k + 1):
                    if out[kk].flag is None:
                        p = out[kk]
                        out[kk] = DispersivePoint(
                            flux=p.flux, chi0=p.chi0, chi1=p.chi1, chi=p.chi,
                            omega_r0=p.omega_r0, omega_r1=p.omega_r1,
                            flag=ResonanceFlag(flux=p.flux, transition=(i, j),
                                               harmonic=1,
                                               detuning=abs(f[kk])))
    return out


def _transition_grid(params, grid, n_levels, basis_size):
    """omega_ji(phi) arrays for i in {0,1}, j > i, over a flux grid."""
    energies = np.empty((grid.size, n_levels))
    for k, phi in enumerate(grid):
        e, _ = _solve(params, phi, basis_size, n_levels)
        energies[k] = e
    return energies


def divergence_scan(params: FluxoniumParams, flux_range,
                    n_levels: int = DEFAULT_N_LEVELS,
                    basis_size: int = DEFAULT_BASIS_SIZE,
                    prescan_step: float = 1e-3) -> list[ResonanceFlag]:
    """Root-find the fluxes where a transition out of |0> or |1> crosses the
    resonator (m = 1).  Returns flags sorted by flux; empty if no crossing."""
    lo, hi = float(min(flux_range)), float(max(flux_range))
    if hi - lo > 1.0:
        raise ValueError("flux range must lie within one flux period")
    grid = np.linspace(lo, hi, max(int(round((hi - lo) / prescan_step)) + 1, 2))
    energies = _transition_grid(params, grid, n_levels, basis_size)
    wr = params.omega_r_bare
    flags = []
    for i in (0, 1):
        for j in range(i + 1, n_levels):
            def detune(phi, i=i, j=j):
                e, _ = _solve(params, phi, basis_size, n_levels)
                return (e[j] - e[i]) - wr
            f = (energies[:, j] - energies[:, i]) - wr
            sign_change = np.nonzero(np.diff(np.sign(f)) != 0)[0]
            for k in sign_change:
                root = brentq(detune, grid[k], grid[k + 1], xtol=1e-10)
                flags.append(ResonanceFlag(
                    flux=FluxBias(float(root)), transition=(i, j), harmonic=1,
                    detuning=abs(detune(root))))
    flags.sort(key=lambda fl: fl.flux.phi)
    return flags


def mist_scan(params: FluxoniumParams, flux_range,
              n_levels: int = DEFAULT_N_LEVELS,
              max_harmonic: int = 3,
              window: float = MIST_WINDOW,
              basis_size: int = DEFAULT_BASIS_SIZE,
              prescan_step: float = 1e-3) -> list[ResonanceFlag]:
    """Flag transitions out of |0> or |1> that approach a harmonic of the
    resonator, |omega_ji - m*omega_r| < window.  One flag per (i, j, m)
    triple, at the flux of closest approach; sorted by ascending detuning."""
    if max_harmonic < 1:
        raise ValueError("max_harmonic must be >= 1")
    if n_levels < 8:
        raise ValueError(f"n_levels must be >= 8, got {n_levels}")
    lo, hi = float(min(flux_range)), float(max(flux_range))
    grid = np.linspace(lo, hi, max(int(round((hi - lo) / prescan_step)) + 1, 2))
    energies = _transition_grid(params, grid, n_levels, basis_size)
    wr = params.omega_r_bare
    flags = []
    for i in (0, 1):
        for j in range(i + 1, n_levels):
            wji = energies[:, j] - energies[:, i]
            for m in range(1, max_harmonic + 1):
                f = wji - m * wr
                k_min = int(np.argmin(np.abs(f)))

                def detune(phi, i=i, j=j, m=m):
                    e, _ = _solve(params, phi, basis_size, n_levels)
                    return (e[j] - e[i]) - m * wr

                best = abs(f[k_min])
                best_phi = grid[k_min]
                sign_change = np.nonzero(np.diff(np.sign(f)) != 0)[0]
                for k in sign_change:
                    root = brentq(detune, grid[k], grid[k + 1], xtol=1e-10)
                    d = abs(detune(root))
                    if d < best:
                        best, best_phi = d, float(root)
                if best < window:
                    flags.append(ResonanceFlag(
                        flux=FluxBias(float(best_phi)), transition=(i, j),
                        harmonic=m, detuning=float(best)))
    flags.sort(key=lambda fl: fl.detuning)
    return flags
