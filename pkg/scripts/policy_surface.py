#!/usr/bin/env python3
"""Success probability and throughput over the (tau1, tau2) simplex.

Scans a regular grid and writes one CSV row per feasible grid point; the two
surfaces peak at different profiles, which is what makes the throughput
objective worth optimising on its own.
"""

import argparse
import csv
import pathlib

from noma_aloha.model import PowerProfile, Scenario, average_throughput, success_probability


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--v1", type=float, default=4.0)
    ap.add_argument("--v2", type=float, default=1.5)
    ap.add_argument("--gamma", type=float, default=1.5)
    ap.add_argument("--step", type=float, default=0.02)
    ap.add_argument("--output", default="results/policy_surface.csv")
    args = ap.parse_args()

    s = Scenario(m=args.m, v1=args.v1, v2=args.v2, gamma=args.gamma)
    path = pathlib.Path(args.output)
    path.parent.mkdir(parents=True, exist_ok=True)

    best_p = (0.0, 0.0, 0.0)
    best_th = (0.0, 0.0, 0.0)
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tau1", "tau2", "p_success", "th_avg"])
        i = 0
        while (tau1 := i * args.step) <= 1.0:
            j = 0
            while tau1 + (tau2 := j * args.step) <= 1.0:
                prof = PowerProfile(tau1, tau2)
                p = success_probability(s, prof)
                th = average_throughput(s, prof)
                writer.writerow(
                    [format(x, ".17g") for x in (tau1, tau2, p, th)]
                )
                rows += 1
                if p > best_p[0]:
                    best_p = (p, tau1, tau2)
                if th > best_th[0]:
                    best_th = (th, tau1, tau2)
                j += 1
            i += 1
    print(f"wrote {path} ({rows} grid points)")
    print(f"success peaks at tau1={best_p[1]:.2f} tau2={best_p[2]:.2f} (p={best_p[0]:.4f})")
    print(f"throughput peaks at tau1={best_th[1]:.2f} tau2={best_th[2]:.2f} (th={best_th[0]:.4f})")


if __name__ == "__main__":
    main()
