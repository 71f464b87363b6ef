#!/usr/bin/env python3
"""Mass and shape universality sweeps: same curvature, same initial moments,
different inertia or envelope, compared trajectory against trajectory."""

import argparse
from pathlib import Path

import numpy as np

from wavefall.config import load_scenario
from wavefall.experiments import wep_mass_sweep, wep_shape_sweep

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def show(report):
    n = len(report.labels)
    print(f"  {report.kind} sweep over {list(report.labels)}")
    print(f"  pass={report.passed} (threshold {report.threshold:.2e}, amplitude {report.amplitude:.3g})")
    worst_dev = float(np.max(report.deviations))
    worst_eta = float(np.max(report.eotvos))
    print(f"  worst pairwise deviation {worst_dev:.3e}, worst Eotvos ratio {worst_eta:.3e}")
    for i in range(n):
        row = " ".join(f"{report.deviations[i, j]:.2e}" for j in range(n))
        print(f"    dev[{report.labels[i]:>12}] {row}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mass-config", default=str(CONFIGS / "wep_mass_1d.json"))
    ap.add_argument("--shape-config", default=str(CONFIGS / "wep_shapes_1d.json"))
    args = ap.parse_args()

    print("mass sweep:")
    show(wep_mass_sweep(load_scenario(args.mass_config)))
    print("shape sweep:")
    show(wep_shape_sweep(load_scenario(args.shape_config)))


if __name__ == "__main__":
    main()
