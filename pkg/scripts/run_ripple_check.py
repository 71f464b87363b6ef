#!/usr/bin/env python3
"""Single-step wave-vector shift: one tidal imprint on an off-center packet
versus the analytic shift -2 pi mu R <x> dt, for each envelope family."""

import argparse
from pathlib import Path

from wavefall.config import load_scenario
from wavefall.experiments import ripple_check
from wavefall.packets import PacketShape, make_packet

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SHAPES = (
    PacketShape.gaussian(1.0),
    PacketShape.skewed_gaussian(1.0, skew=1.0),
    PacketShape.double_peak(0.7, half_separation=1.2),
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=str(CONFIGS / "ripple_1d.json"))
    args = ap.parse_args()
    scenario = load_scenario(args.config)

    for shape in SHAPES:
        wf = make_packet(scenario.grid, shape, scenario.x0, scenario.v0, scenario.mass)
        rep = ripple_check(wf, scenario.tidal, scenario.evolve_cfg.dt)
        print(f"{shape.kind:>16}: predicted dk={rep.predicted[0]:+.9e} "
              f"measured={rep.measured[0]:+.9e} rel err={rep.relative_error:.2e}")


if __name__ == "__main__":
    main()
