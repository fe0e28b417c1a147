#!/usr/bin/env python3
"""Gesture recognition accuracy across tracing-noise levels, over the
bundled template set.  Noise sigma is expressed in canonical units
(fractions of the gesture's longer side).
"""

import argparse
import sys

from gazekit.bundled import bundled_template_store
from gazekit.gestures import recognize
from gazekit.synth import NoiseModel, synth_gesture


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=400)
    parser.add_argument("--scale", type=float, default=400.0)
    args = parser.parse_args()

    store = bundled_template_store()
    print(f"templates: {len(store.templates)}, trials per sigma: {args.trials}, "
          f"scale {args.scale:g} px, reject threshold {store.reject_threshold}")
    print(f"{'sigma':>6} {'accuracy':>9} {'no_match':>9}")
    for sigma in (0.0, 0.01, 0.02, 0.05, 0.08, 0.12):
        hits = 0
        rejects = 0
        for i in range(args.trials):
            tpl = store.templates[i % len(store.templates)]
            gp = synth_gesture(tpl, args.scale, (960.0, 540.0),
                               NoiseModel(sigma_px=sigma * args.scale, seed=i))
            result = recognize(store, gp)
            if result is None:
                rejects += 1
            elif result.template_name == tpl.name:
                hits += 1
        print(f"{sigma:>6g} {hits / args.trials:>9.4f} {rejects / args.trials:>9.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
