#!/usr/bin/env python3
"""Linearized standing-wave analysis for a rectangular tank.

Small-amplitude waves over depth d with gravity g0 and kinematic surface
tension tau/rho satisfy

    omega^2 = (g0 k + (tau/rho) k^3) tanh(k d),   k = mode * pi / L.

The script prints the angular frequency and period for a parameter set, and
optionally extracts the measured frequency from a trajectory CSV produced by
`ph run` (successive minima of the kinetic energy are half a period apart).

Usage:
    linear_dispersion.py --g0 1.0 --tau 0.0 --rho 1.0 --depth 0.5 --length 1.0 --mode 1
    linear_dispersion.py ... --trajectory out/run_trajectory.csv
"""

import argparse
import csv
import math
import sys


def dispersion(g0, tau, rho, depth, length, mode):
    k = mode * math.pi / length
    w2 = (g0 * k + (tau / rho) * k**3) * math.tanh(k * depth)
    return math.sqrt(w2)


def measured_frequency(path):
    ts, hk = [], []
    with open(path) as f:
        for row in csv.DictReader(f):
            ts.append(float(row["t"]))
            hk.append(float(row["H_kin"]))
    if len(ts) < 5:
        raise SystemExit("trajectory too short to locate kinetic-energy minima")
    peak = max(hk)
    minima = []
    for i in range(1, len(hk) - 1):
        if hk[i] <= hk[i - 1] and hk[i] <= hk[i + 1] and hk[i] < 0.25 * peak:
            a, b, c = hk[i - 1], hk[i], hk[i + 1]
            den = a - 2 * b + c
            delta = 0.5 * (a - c) / den if den else 0.0
            minima.append(ts[i] + delta * (ts[1] - ts[0]))
    if len(minima) < 2:
        raise SystemExit("could not locate two kinetic-energy minima")
    half = (minima[-1] - minima[0]) / (len(minima) - 1)
    return math.pi / half


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--g0", type=float, default=1.0)
    ap.add_argument("--tau", type=float, default=0.0)
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--depth", type=float, default=0.5)
    ap.add_argument("--length", type=float, default=1.0)
    ap.add_argument("--mode", type=int, default=1)
    ap.add_argument("--trajectory", help="ph run trajectory CSV to compare against")
    args = ap.parse_args()

    w = dispersion(args.g0, args.tau, args.rho, args.depth, args.length, args.mode)
    print(f"k = {args.mode * math.pi / args.length:.12g}")
    print(f"omega = {w:.12g}")
    print(f"period = {2 * math.pi / w:.12g}")
    if args.trajectory:
        wm = measured_frequency(args.trajectory)
        rel = abs(wm - w) / w
        print(f"measured omega = {wm:.12g}")
        print(f"relative error = {rel:.3e}")
        sys.exit(0 if rel <= 0.03 else 1)


if __name__ == "__main__":
    main()
