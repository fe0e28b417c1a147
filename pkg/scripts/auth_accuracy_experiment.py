#!/usr/bin/env python3
"""Pursuit-authentication accuracy as a function of gaze noise and
calibration offset.  Prints one row per condition; everything is seeded,
so reruns reproduce the table exactly.
"""

import argparse
import math
import sys

from gazekit.auth import AuthConfig, gen_trajectories, match_epoch
from gazekit.core import CalibrationDisturbance, apply_disturbance
from gazekit.rng import SplitMix64, derive_seed
from gazekit.synth import NoiseModel, synth_follow


def epoch_accuracy(config, epochs, sigma, offset, rate_hz, seed0):
    hits = 0
    for i in range(epochs):
        seed = seed0 + i
        trajs = gen_trajectories(config, seed)
        rng = SplitMix64(derive_seed(seed, 0xE9))
        target = rng.randint(len(trajs))
        samples = synth_follow(trajs[target], config.epoch_ms, rate_hz,
                               NoiseModel(sigma_px=sigma, seed=seed))
        if offset > 0:
            angle = rng.uniform_in(0.0, 2.0 * math.pi)
            samples = apply_disturbance(
                samples,
                CalibrationDisturbance(dx=offset * math.cos(angle),
                                       dy=offset * math.sin(angle)),
                config.screen_w,
                config.screen_h,
            )
        match = match_epoch(samples, trajs, (0, config.epoch_ms), config)
        hits += match.winner == trajs[target].shape_id
    return hits / epochs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--epochs", type=int, default=300)
    parser.add_argument("--rate", type=float, default=60.0)
    parser.add_argument("--seed0", type=int, default=1)
    args = parser.parse_args()

    config = AuthConfig()
    print(f"epochs per condition: {args.epochs}, shapes: {config.shape_count}, "
          f"epoch {config.epoch_ms} ms, rate {args.rate:g} Hz")
    print(f"{'sigma_px':>8} {'offset_px':>9} {'accuracy':>9}")
    for sigma in (0.0, 5.0, 15.0, 30.0, 60.0):
        for offset in (0.0, 30.0):
            acc = epoch_accuracy(config, args.epochs, sigma, offset, args.rate, args.seed0)
            print(f"{sigma:>8g} {offset:>9g} {acc:>9.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
