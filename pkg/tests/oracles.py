"""Independent numerical oracles used only by the test suite.

These deliberately avoid the library's solver choices: the spectrum oracle
diagonalizes the circuit Hamiltonian with second-order finite differences on
a dense phase grid (instead of the oscillator basis), and the erfc inverse
uses plain bisection.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import erfc

TWO_PI = 2.0 * math.pi


def phase_grid_spectrum(params, phi_ext, n_points: int = 4001,
                        span: float = 6.0 * math.pi, n_levels: int = 8):
    """Finite-difference diagonalization on phi in [-span, span].

    Returns (energies ground-referenced, |<i|n|j>| matrix).
    """
    phi = np.linspace(-span, span, n_points)
    h = phi[1] - phi[0]
    v = (-params.e_j * np.cos(phi - TWO_PI * phi_ext)
         + 0.5 * params.e_l * phi ** 2)
    # H = -4 E_C d^2/dphi^2 + V(phi), tridiagonal in the grid basis
    diag = 8.0 * params.e_c / h ** 2 + v
    off = np.full(n_points - 1, -4.0 * params.e_c / h ** 2)
    evals, evecs = eigh_tridiagonal(diag, off, select="i",
                                    select_range=(0, n_levels - 1))
    energies = evals - evals[0]
    # n = -i d/dphi via central differences (normalized grid eigenvectors)
    n_mat = np.empty((n_levels, n_levels))
    dpsi = np.empty_like(evecs)
    dpsi[1:-1] = (evecs[2:] - evecs[:-2]) / (2.0 * h)
    dpsi[0] = (evecs[1] - evecs[0]) / h
    dpsi[-1] = (evecs[-1] - evecs[-2]) / h
    for i in range(n_levels):
        for j in range(n_levels):
            n_mat[i, j] = abs(np.dot(evecs[:, i], dpsi[:, j]))
    return energies, n_mat


def invert_snr_limited_error(target: float, lo: float = 0.0,
                             hi: float = 50.0, tol: float = 1e-12) -> float:
    """Bisection solve of erfc(x/2)/2 = target for x."""
    f = lambda x: 0.5 * erfc(x / 2.0) - target
    assert f(lo) > 0 > f(hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def steady_state_photons(epsilon: float, delta: float, kappa: float) -> float:
    """Closed-form |alpha_ss|^2 for the driven damped cavity."""
    return epsilon ** 2 / (delta ** 2 + kappa ** 2 / 4.0)
