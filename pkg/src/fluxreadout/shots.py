"""Monte-Carlo single-shot readout: sampling, Gaussian fits, assignment error.

Each shot integrates the output-field difference over [0, tau].  The noiseless
signal for a shot is the trajectory integral of the true qubit state; shots
prepared (after a possible initialization flip) in |1> relax at a random
exponential time and continue on the |0> trajectory integral from there.
Complex Gaussian noise is added with the per-quadrature standard deviation
tied to the analytic SNR at tau, so shot-level and analytic error curves
agree by construction in the ideal-noise limit.
"""
from __future__ import annotations

from dataclasses import dataclass
import csv
import math

import numpy as np
from scipy.optimize import curve_fit

from .dynamics import CavityTrajectory, snr_vs_time
from .errors import FitError


@dataclass(frozen=True)
class NoiseModel:
    """Initialization-flip probabilities, relaxation time during measurement
    and measurement efficiency."""

    p_init0: float = 0.0
    p_init1: float = 0.0
    t1: float = math.inf
    eta: float = 1.0

    def __post_init__(self):
        for name in ("p_init0", "p_init1"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if not self.t1 > 0:
            raise ValueError(f"t1 must be > 0, got {self.t1}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")


@dataclass(frozen=True)
class ShotSet:
    """Integrated heterodyne results with prepared-state labels."""

    prepared: np.ndarray
    integrated: np.ndarray
    tau: float
    seed: int

    def __post_init__(self):
        p = np.asarray(self.prepared, dtype=int)
        z = np.asarray(self.integrated, dtype=complex)
        if p.size != z.size:
            raise ValueError("prepared and integrated must have equal length")
        p.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "prepared", p)
        object.__setattr__(self, "integrated", z)

    @property
    def n_shots(self) -> int:
        return self.prepared.size

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["prepared", "i", "q"])
            for p, z in zip(self.prepared, self.integrated):
                w.writerow([p, f"{z.real:.17g}", f"{z.imag:.17g}"])

    @classmethod
    def from_csv(cls, path, tau=0.0, seed=0):
        prepared, vals = [], []
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            next(r)  # header
            for row in r:
                prepared.append(int(row[0]))
                vals.append(complex(float(row[1]), float(row[2])))
        return cls(prepared=np.array(prepared), integrated=np.array(vals),
                   tau=tau, seed=seed)


def _cumulative_integrals(traj: CavityTrajectory, k: int):
    """Trapezoid cumulative integrals of both output fields up to index k."""
    t = traj.time_grid[:k + 1]
    dt = np.diff(t)
    c0 = np.concatenate(([0.0], np.cumsum(
        (traj.alpha_out0[1:k + 1] + traj.alpha_out0[:k]) / 2.0 * dt)))
    c1 = np.concatenate(([0.0], np.cumsum(
        (traj.alpha_out1[1:k + 1] + traj.alpha_out1[:k]) / 2.0 * dt)))
    return t, c0, c1


def sample_shots(traj: CavityTrajectory, noise: NoiseModel, tau: float,
                 n_shots: int, seed: int, noise_norm: float = 1.0,
                 n_chunks: int = 1) -> ShotSet:
    """Draw n_shots integrated readout results at integration time tau.

    Reproducible: the stream is derived from ``numpy.random.SeedSequence(seed)``
    split into ``n_chunks`` children (chunk c generates shots
    [c*m, (c+1)*m)), so a fixed (seed, n_chunks) pair is bit-stable and
    chunks may be generated in parallel.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    if n_chunks < 1 or n_shots % n_chunks:
        raise ValueError("n_chunks must divide n_shots")
    t = traj.time_grid
    if not t[0] <= tau <= t[-1]:
        raise ValueError(f"tau={tau:g} s outside trajectory grid")
    k = int(np.argmin(np.abs(t - tau)))
    if k == 0:
        raise ValueError("tau too small: no samples to integrate")
    tg, c0, c1 = _cumulative_integrals(traj, k)
    i0, i1 = c0[-1], c1[-1]

    curve = snr_vs_time(traj, noise.eta, noise_norm=noise_norm)
    snr = float(curve.snr[k])
    sep = abs(i1 - i0)
    if sep > 0 and snr > 0:
        sigma = sep / (math.sqrt(2.0) * snr)
    else:
        # degenerate clusters (chi = 0 or no drive): any positive noise
        # scale yields the correct 50% limit
        sigma = max(abs(i0), abs(i1), 1.0)

    root = np.random.SeedSequence(seed)
    children = root.spawn(n_chunks)
    m = n_shots // n_chunks
    prepared = np.tile([0, 1], (n_shots + 1) // 2)[:n_shots]
    signals = np.empty(n_shots, dtype=complex)
    for c, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        sl = slice(c * m, (c + 1) * m)
        prep = prepared[sl]
        flip = rng.random(m) < np.where(prep == 0, noise.p_init0,
                                        noise.p_init1)
        true_state = prep ^ flip
        # relaxation of shots that start in |1>
        t_decay = rng.exponential(noise.t1, m) if np.isfinite(noise.t1) \
            else np.full(m, np.inf)
        td = np.minimum(t_decay, tg[-1])
        c1_td = (np.interp(td, tg, c1.real) + 1j * np.interp(td, tg, c1.imag))
        c0_td = (np.interp(td, tg, c0.real) + 1j * np.interp(td, tg, c0.imag))
        sig_1 = c1_td + (i0 - c0_td)  # |1> until td, then |0> trajectory
        signals[sl] = np.where(true_state == 1, sig_1, i0)
        signals[sl] += (rng.normal(0.0, sigma, m)
                        + 1j * rng.normal(0.0, sigma, m))
    return ShotSet(prepared=prepared, integrated=signals, tau=float(tg[-1]),
                   seed=seed)


@dataclass(frozen=True)
class GaussianFit:
    """Per-state Gaussians after projection onto the separation axis."""

    mu0: float
    mu1: float
    sigma0: float
    sigma1: float
    threshold: float
    axis_origin: complex
    axis: complex

    def __post_init__(self):
        if not (self.sigma0 > 0 and self.sigma1 > 0):
            raise ValueError("fitted sigmas must be > 0")

    @property
    def snr(self) -> float:
        """Separation over combined width, |mu1 - mu0| / sqrt(sigma0^2 + sigma1^2)."""
        return (abs(self.mu1 - self.mu0)
                / math.sqrt(self.sigma0 ** 2 + self.sigma1 ** 2))

    def project(self, z):
        return np.real((np.asarray(z) - self.axis_origin)
                       * np.conj(self.axis))


def _gauss(x, a, mu, s):
    return a * np.exp(-((x - mu) ** 2) / (2.0 * s ** 2))


def _fit_one(x):
    """Gaussian histogram fit of one projected cluster."""
    if x.size < 8:
        mu, s = float(np.mean(x)), float(np.std(x))
        if s == 0:
            raise FitError("cluster has zero spread")
        return mu, s
    n_bins = min(80, max(16, x.size // 200))
    counts, edges = np.histogram(x, bins=n_bins)
    centers = (edges[:-1] + edges[1:]) / 2.0
    p0 = (counts.max(), float(np.mean(x)), max(float(np.std(x)), 1e-300))
    try:
        popt, _ = curve_fit(_gauss, centers, counts, p0=p0, maxfev=20000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"gaussian histogram fit failed: {exc}") from exc
    if popt[2] == 0 or not np.all(np.isfinite(popt)):
        raise FitError("degenerate gaussian fit")
    return float(popt[1]), float(abs(popt[2]))


def _minimal_overlap_threshold(mu0, s0, mu1, s1):
    """Point where the two fitted unit-weight Gaussians cross between the
    means (equal-prior minimal-overlap decision boundary)."""
    if abs(s0 - s1) < 1e-12 * max(s0, s1):
        return (mu0 * s1 + mu1 * s0) / (s0 + s1)
    # equate log densities: quadratic in x
    a = 1.0 / s1 ** 2 - 1.0 / s0 ** 2
    b = -2.0 * (mu1 / s1 ** 2 - mu0 / s0 ** 2)
    c = mu1 ** 2 / s1 ** 2 - mu0 ** 2 / s0 ** 2 + 2.0 * math.log(s1 / s0)
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return (mu0 + mu1) / 2.0
    lo, hi = min(mu0, mu1), max(mu0, mu1)
    for sign in (+1.0, -1.0):
        x = (-b + sign * math.sqrt(disc)) / (2.0 * a)
        if lo <= x <= hi:
            return x
    return (mu0 + mu1) / 2.0


def fit_gaussians(shots: ShotSet) -> GaussianFit:
    """Project shots onto the line through the two cluster means and fit one
    Gaussian per prepared label; threshold at minimal overlap."""
    z = shots.integrated
    labels = shots.prepared
    if not (np.any(labels == 0) and np.any(labels == 1)):
        raise ValueError("both prepared labels must be present")
    if np.all(z == z[0]):
        raise FitError("all shots identical")
    m0 = complex(np.mean(z[labels == 0]))
    m1 = complex(np.mean(z[labels == 1]))
    sep = m1 - m0
    axis = sep / abs(sep) if abs(sep) > 0 else 1.0 + 0.0j
    origin = (m0 + m1) / 2.0
    x = np.real((z - origin) * np.conj(axis))
    mu0, s0 = _fit_one(x[labels == 0])
    mu1, s1 = _fit_one(x[labels == 1])
    thr = _minimal_overlap_threshold(mu0, s0, mu1, s1)
    return GaussianFit(mu0=mu0, mu1=mu1, sigma0=s0, sigma1=s1, threshold=thr,
                       axis_origin=origin, axis=axis)


@dataclass(frozen=True)
class AssignmentResult:
    error: float
    p0_given_1: float
    p1_given_0: float


def assignment_error(shots: ShotSet, fit: GaussianFit) -> AssignmentResult:
    """Threshold-classify shots and return (P(0|1) + P(1|0))/2 with both
    confusion entries."""
    if not np.isfinite(fit.threshold):
        raise ValueError("fit threshold must be finite")
    x = fit.project(shots.integrated)
    labels = shots.prepared
    if fit.mu1 >= fit.mu0:
        assigned = (x > fit.threshold).astype(int)
    else:
        assigned = (x < fit.threshold).astype(int)
    p01 = float(np.mean(assigned[labels == 1] == 0))
    p10 = float(np.mean(assigned[labels == 0] == 1))
    return AssignmentResult(error=(p01 + p10) / 2.0, p0_given_1=p01,
                            p1_given_0=p10)
