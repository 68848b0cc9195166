#!/usr/bin/env python3
"""Scan the dispersive shift versus external flux and print the landmarks.

Prints the sweet-spot and flux-pulse-assisted operating-point shifts, then
lists every divergence (resonator-transition crossing) found in the scanned
window together with the straddling grid points flagged in the chi curve.

Usage:
    python3 scripts/dispersive_scan.py [--lo 0.45] [--hi 0.75] [--num 301]
"""
import argparse
import math

import numpy as np

import fluxreadout as fr

TWO_PI = 2.0 * math.pi


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lo", type=float, default=0.45)
    ap.add_argument("--hi", type=float, default=0.75)
    ap.add_argument("--num", type=int, default=301)
    args = ap.parse_args()

    params = fr.FluxoniumParams()
    for name, phi in (("sweet spot", 0.5), ("FPA point", 0.6567)):
        pt = fr.dispersive_point(params, phi)
        print(f"{name:>11s} (phi = {phi}): chi/2pi = "
              f"{pt.chi / TWO_PI / 1e6:+.4f} MHz, dressed resonator "
              f"{pt.omega_r0 / TWO_PI / 1e9:.5f} / "
              f"{pt.omega_r1 / TWO_PI / 1e9:.5f} GHz")

    print(f"\ndivergences in [{args.lo}, {args.hi}]:")
    for flag in fr.divergence_scan(params, (args.lo, args.hi)):
        i, j = flag.transition
        print(f"  phi = {flag.flux.phi:.5f}  transition |{i}> -> |{j}>  "
              f"residual detuning {flag.detuning / TWO_PI / 1e3:.3f} kHz")

    grid = np.linspace(args.lo, args.hi, args.num)
    pts = fr.chi_vs_flux(params, grid)
    flagged = [p.flux.phi for p in pts if p.flagged]
    print(f"\nflagged grid points ({len(flagged)} of {len(pts)}):")
    for phi in flagged:
        print(f"  phi = {phi:.5f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
