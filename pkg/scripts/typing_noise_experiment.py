#!/usr/bin/env python3
"""Dwell-free typing metrics as gaze jitter grows: a self-correcting
synthetic typist works the bundled phrase set and the mean WPM / KSPC /
RBA per noise level is reported.
"""

import argparse
import sys

from gazekit.bundled import BUNDLED_PHRASES, default_layout
from gazekit.keyboard import TypingSession, compute_metrics, typing_step
from gazekit.rng import derive_seed
from gazekit.synth import NoiseModel, synth_typist


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--interval", type=int, default=250, help="ms per aimed press")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    layout = default_layout()
    phrases = BUNDLED_PHRASES
    print(f"phrases: {len(phrases)}, interval {args.interval} ms")
    print(f"{'sigma_px':>8} {'wpm':>8} {'kspc':>8} {'rba':>8} {'finished':>9}")
    for sigma in (0.0, 15.0, 30.0, 45.0, 60.0):
        wpm = kspc = rba = 0.0
        finished = 0
        for i, phrase in enumerate(phrases):
            noise = NoiseModel(sigma_px=sigma, seed=derive_seed(args.seed, i))
            session = TypingSession(layout=layout, target_phrase=phrase)
            for ev in synth_typist(layout, phrase, noise, key_interval_ms=args.interval):
                typing_step(session, ev)
            m = compute_metrics(session)
            wpm += m.wpm
            kspc += m.kspc
            rba += m.rba
            finished += session.transcribed == phrase
        n = len(phrases)
        print(f"{sigma:>8g} {wpm / n:>8.3f} {kspc / n:>8.3f} {rba / n:>8.3f} "
              f"{finished}/{n:<7}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
