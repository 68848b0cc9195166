#!/usr/bin/env python3
"""Reproduce the full readout experiment with the packaged device config.

Runs spectrum, chi, readout and sweep with the bundled reference
configuration and collects the CSV outputs under a single directory.

Usage:
    python3 scripts/reproduce_readout.py [outdir] [--shots N] [--svg]
"""
import argparse
import sys

from fluxreadout.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="results")
    ap.add_argument("--shots", type=int, default=None,
                    help="override shot count for the readout stage")
    ap.add_argument("--svg", action="store_true",
                    help="also write SVG plots (needs matplotlib)")
    args = ap.parse_args()

    common = ["--out", args.outdir]
    if args.svg:
        common.append("--svg")

    for cmd in ("spectrum", "chi", "readout", "sweep"):
        argv = [cmd] + common
        if cmd == "readout" and args.shots is not None:
            argv += ["--shots", str(args.shots)]
        print(f"== fluxreadout {cmd} ==")
        rc = cli_main(argv)
        if rc != 0:
            print(f"{cmd} failed with exit code {rc}", file=sys.stderr)
            return rc
    print(f"done; outputs in {args.outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
