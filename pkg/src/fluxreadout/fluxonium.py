"""Single fluxonium circuit: Hamiltonian construction and diagonalization.

The Hamiltonian is H = 4 E_C n^2 - E_J cos(phi - 2 pi Phi_ext/Phi_0)
+ (1/2) E_L phi^2, built in the harmonic-oscillator basis of the linear
(LC) part of the circuit.  All energies are angular frequencies (rad/s).
Putting the external flux inside the cosine keeps the kinetic and inductive
terms flux-independent, so spectra are exactly periodic in Phi_ext/Phi_0
with period 1 and reflection-symmetric about the half-flux sweet spot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import eigh

from .errors import TruncationError

TWO_PI = 2.0 * math.pi

DEFAULT_BASIS_SIZE = 120
DEFAULT_N_LEVELS = 12
# relative energy shift allowed when the basis is enlarged by 25%
CONVERGENCE_RTOL = 1e-8


@dataclass(frozen=True)
class FluxoniumParams:
    """Device card.  All fields are angular frequencies (2*pi*Hz).

    Defaults carry the reference device: E_J/2pi = 3.82 GHz,
    E_C/2pi = 0.865 GHz, E_L/2pi = 0.822 GHz, g/2pi = 37.2 MHz,
    omega_r/2pi = 5.175 GHz, kappa/2pi = 6.04 MHz.
    """

    e_j: float = TWO_PI * 3.82e9
    e_c: float = TWO_PI * 0.865e9
    e_l: float = TWO_PI * 0.822e9
    g: float = TWO_PI * 37.2e6
    omega_r_bare: float = TWO_PI * 5.175e9
    kappa: float = TWO_PI * 6.04e6

    def __post_init__(self):
        for name in ("e_j", "e_c", "e_l", "omega_r_bare", "kappa"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not (np.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"g must be finite and >= 0, got {self.g!r}")


@dataclass(frozen=True)
class FluxBias:
    """Dimensionless external flux Phi_ext/Phi_0."""

    phi: float

    def __post_init__(self):
        if not np.isfinite(self.phi):
            raise ValueError(f"flux bias must be finite, got {self.phi!r}")


def _as_bias(flux) -> FluxBias:
    return flux if isinstance(flux, FluxBias) else FluxBias(float(flux))


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenenergies (ground-referenced, rad/s) and charge matrix element
    magnitudes |<i|n|j>| at one flux bias."""

    energies: np.ndarray
    n_elements: np.ndarray
    basis_size: int
    flux: FluxBias

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        n = np.asarray(self.n_elements, dtype=float)
        e.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "n_elements", n)
        if e.ndim != 1 or n.shape != (e.size, e.size):
            raise ValueError("energies must be 1-d and n_elements square")
        if np.any(np.diff(e) < 0) or abs(e[0]) > 1e-30:
            raise ValueError("energies must be nondecreasing and ground-referenced")

    @property
    def n_levels(self) -> int:
        return self.energies.size


@lru_cache(maxsize=8)
def _oscillator_operators(basis_size: int, e_c: float, e_l: float):
    """Ladder-built phi and n operators plus the eigendecomposition of phi
    (used to evaluate the cosine).  Cached: these depend only on E_C/E_L."""
    phi_zpf = (2.0 * e_c / e_l) ** 0.25
    n_zpf = (e_l / (32.0 * e_c)) ** 0.25
    a = np.diag(np.sqrt(np.arange(1, basis_size)), 1)
    ad = a.T
    phi_op = phi_zpf * (a + ad)
    # n = i n_zpf (a^dag - a); only n n^dag products are needed real
    n_op = 1j * n_zpf * (ad - a)
    kinetic = 4.0 * e_c * np.real(n_op @ n_op)
    inductive = 0.5 * e_l * phi_op @ phi_op
    d, v = eigh(phi_op)
    for m in (phi_op, kinetic, inductive, d, v):
        m.setflags(write=False)
    return d, v, kinetic + inductive, n_op


def _solve(params: FluxoniumParams, phi_ext: float, basis_size: int,
           n_levels: int, want_vectors: bool = True):
    d, v, h_quad, n_op = _oscillator_operators(basis_size, params.e_c, params.e_l)
    cos_mat = (v * np.cos(d - TWO_PI * phi_ext)) @ v.T
    h = h_quad - params.e_j * cos_mat
    if not want_vectors:
        return eigh(h, eigvals_only=True)[:n_levels], None
    evals, evecs = eigh(h)
    energies = evals[:n_levels] - evals[0]
    sub = evecs[:, :n_levels]
    n_elements = np.abs(sub.conj().T @ n_op @ sub)
    return energies, n_elements


def diagonalize(params: FluxoniumParams, flux, basis_size: int = DEFAULT_BASIS_SIZE,
                n_levels: int = DEFAULT_N_LEVELS,
                check_convergence: bool = True) -> SpectrumResult:
    """Diagonalize the fluxonium Hamiltonian at one flux bias.

    Returns the lowest ``n_levels`` eigenenergies (ground-referenced) and the
    matrix of charge matrix element magnitudes.  When ``check_convergence``
    is set, the energies are recomputed with a 25% larger basis and a
    :class:`TruncationError` is raised if they shift by more than 1e-8
    relative.
    """
    bias = _as_bias(flux)
    if n_levels < 2:
        raise ValueError(f"n_levels must be >= 2, got {n_levels}")
    if basis_size < 4 * n_levels:
        raise ValueError(
            f"basis_size must be >= 4*n_levels ({4 * n_levels}), got {basis_size}")
    energies, n_elements = _solve(params, bias.phi, basis_size, n_levels)
    if check_convergence:
        bigger = int(math.ceil(1.25 * basis_size))
        e_big, _ = _solve(params, bias.phi, bigger, n_levels, want_vectors=False)
        e_big = e_big - e_big[0]
        scale = max(energies[-1], e_big[-1])
        shift = np.max(np.abs(energies - e_big)) / scale
        if shift > CONVERGENCE_RTOL:
            raise TruncationError(
                f"energies shifted {shift:.2e} relative when basis grew "
                f"{basis_size} -> {bigger} (tolerance {CONVERGENCE_RTOL:.0e})")
    return SpectrumResult(energies=energies, n_elements=n_elements,
                          basis_size=basis_size, flux=bias)


def transition_frequency(spec: SpectrumResult, i: int, j: int) -> float:
    """omega_ji = E_j - E_i in rad/s for levels i <= j."""
    n = spec.n_levels
    if not (0 <= i <= j < n):
        raise IndexError(f"need 0 <= i <= j < {n}, got ({i}, {j})")
    return float(spec.energies[j] - spec.energies[i])


def charge_element(spec: SpectrumResult, i: int, j: int) -> float:
    """|<i|n|j>| for levels i, j."""
    n = spec.n_levels
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"level indices must be < {n}, got ({i}, {j})")
    return float(spec.n_elements[i, j])


def spectrum_vs_flux(params: FluxoniumParams, flux_grid,
                     n_levels: int = DEFAULT_N_LEVELS,
                     basis_size: int = DEFAULT_BASIS_SIZE,
                     check_convergence: bool = True) -> list[SpectrumResult]:
    """Diagonalize on each point of a flux grid, preserving order."""
    grid = np.atleast_1d(np.asarray(flux_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("flux grid must be nonempty")
    if not np.all(np.isfinite(grid)):
        raise ValueError("flux grid must be finite")
    results = []
    for k, phi in enumerate(grid):
        try:
            results.append(diagonalize(params, phi, basis_size=basis_size,
                                       n_levels=n_levels,
                                       check_convergence=check_convergence))
        except TruncationError as exc:
            raise TruncationError(
                f"grid point {k} (phi={phi:g}): {exc}") from exc
    return results
