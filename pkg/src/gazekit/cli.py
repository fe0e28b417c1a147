"""Command line front end.

Subcommands: train, recognize, auth-sim, type-sim, replay, serve, bench.
Simulation and recognition output is deterministic for fixed seeds (no
wall-clock anywhere except bench, which measures it on purpose).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

from . import bundled
from .auth import AuthConfig, dump_transcript, gen_trajectories, match_epoch, run_auth_session
from .core import CalibrationDisturbance, apply_disturbance
from .gestures import (
    GesturePath,
    TemplateStore,
    load_store,
    recognize,
    save_store,
    train_template,
)
from .keyboard import TypingSession, compute_metrics, load_layout, typing_step
from .replay import events_from_records, load_replay
from .rng import SplitMix64, derive_seed
from .service import DEFAULT_PORT, PORT_ENV_VAR, canonical_json, run_replay_via_service, serve
from .synth import NoiseModel, synth_follow, synth_gesture, synth_session_follower, synth_typist


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_paths_file(path: str) -> list[tuple[str, str, GesturePath]]:
    """Sample-path file: one sample per line, `name action_id x1 y1 x2 y2 ...`."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) < 6 or len(fields) % 2 != 0:
                raise ValueError(
                    f"{path}:{lineno}: want 'name action_id x1 y1 ...' with >= 2 points"
                )
            coords = [float(v) for v in fields[2:]]
            pts = [(coords[i], coords[i + 1]) for i in range(0, len(coords), 2)]
            out.append((fields[0], fields[1], GesturePath.of(pts)))
    return out


def _cmd_train(args) -> int:
    samples = _load_paths_file(args.paths)
    if not samples:
        return _fail(f"no sample paths in {args.paths}")
    store = TemplateStore(n=args.n, reject_threshold=args.threshold)
    grouped: dict[str, tuple[str, list[GesturePath]]] = {}
    order: list[str] = []
    for name, action_id, path in samples:
        if name not in grouped:
            grouped[name] = (action_id, [])
            order.append(name)
        elif grouped[name][0] != action_id:
            return _fail(f"gesture {name} bound to conflicting actions")
        grouped[name][1].append(path)
    for name in order:
        action_id, paths = grouped[name]
        train_template(store, name, paths, action_id)
        print(f"trained {name} -> {action_id} ({len(paths)} sample{'s' if len(paths) != 1 else ''})")
    save_store(store, args.out)
    print(f"store written: {args.out} ({len(store.templates)} templates, n={store.n})")
    return 0


def _strokes_from_replay(path: str):
    records, meta = load_replay(path)
    events = events_from_records(records)
    return events, meta


def _cmd_recognize(args) -> int:
    store = load_store(args.store)
    if not store.templates:
        return _fail(f"template store is empty: {args.store}")
    events, _meta = _strokes_from_replay(args.replay)
    from .service import run_replay_direct

    results = run_replay_direct(
        "gesture",
        events,
        {
            "templates": [
                {"name": t.name, "action_id": t.action_id, "points": [[x, y] for x, y in t.points]}
                for t in store.templates
            ],
            "n": store.n,
            "reject_threshold": store.reject_threshold,
            "source": args.source,
            "dispersion_px": args.dispersion,
            "min_duration_ms": args.min_duration,
        },
    )
    strokes = 0
    matched = 0
    for event in results:
        if event["type"] != "gesture_result":
            continue
        strokes += 1
        if event["error"]:
            print(f"stroke {event['index']} t={event['t_ms']} -> error: {event['error']}")
        elif event["match"] is None:
            print(f"stroke {event['index']} t={event['t_ms']} -> no-match")
        else:
            m = event["match"]
            matched += 1
            print(
                f"stroke {event['index']} t={event['t_ms']} -> {m['name']} {m['action_id']} "
                f"score={m['score']!r} distance={m['distance']!r}"
            )
    print(f"strokes {strokes} matched {matched}")
    if strokes == 0:
        return _fail("replay contains no trigger-delimited strokes")
    return 0


def _cmd_auth_sim(args) -> int:
    config = AuthConfig(
        shape_count=args.shapes,
        epoch_ms=args.epoch_ms,
        inter_epoch_ms=args.inter_epoch_ms,
        password_length=args.password_length,
    )
    print(
        f"auth-sim seeds={args.seeds} noise={args.noise!r} latency={args.latency} "
        f"rate={args.rate!r} disturb={args.disturb!r}"
    )
    print(f"nominal_duration_ms {config.nominal_duration_ms}")
    conditions = [("true-calibration", None)]
    if args.disturb > 0:
        conditions.append(
            (f"disturbed-{args.disturb:g}px", args.disturb)
        )
    accepted = {name: 0 for name, _ in conditions}
    for i in range(args.seeds):
        seed = args.seed0 + i
        trajectories = gen_trajectories(config, seed)
        rng = SplitMix64(derive_seed(seed, 0x9A55))
        ids = [t.shape_id for t in trajectories]
        password = [rng.choice(ids) for _ in range(config.password_length)]
        noise = NoiseModel(sigma_px=args.noise, latency_ms=args.latency, seed=seed)
        stream = synth_session_follower(trajectories, password, config, args.rate, noise)
        for name, disturb in conditions:
            if disturb is None:
                samples = stream
            else:
                angle = rng.uniform_in(0.0, 2.0 * math.pi)
                d = CalibrationDisturbance(
                    dx=disturb * math.cos(angle), dy=disturb * math.sin(angle)
                )
                samples = apply_disturbance(stream, d, config.screen_w, config.screen_h)
            session = run_auth_session(samples, config, seed, password)
            if session.outcome == "Accept":
                accepted[name] += 1
            if args.out_dir:
                os.makedirs(args.out_dir, exist_ok=True)
                fname = os.path.join(args.out_dir, f"transcript_{name}_{seed}.txt")
                with open(fname, "w", encoding="utf-8") as fh:
                    fh.write(dump_transcript(session, seed, config))
    print(f"{'condition':<20} {'sessions':>8} {'accepted':>8} {'accuracy':>9}")
    for name, _ in conditions:
        acc = accepted[name] / args.seeds
        print(f"{name:<20} {args.seeds:>8} {accepted[name]:>8} {acc:>9.4f}")
    return 0


def _cmd_type_sim(args) -> int:
    layout = load_layout(args.layout) if args.layout else bundled.default_layout()
    if args.phrases:
        with open(args.phrases, "r", encoding="utf-8") as fh:
            phrases = [line.rstrip("\n") for line in fh if line.strip()]
    else:
        phrases = list(bundled.BUNDLED_PHRASES)
    if not phrases:
        return _fail("phrase set is empty")
    print(
        f"type-sim phrases={len(phrases)} noise={args.noise!r} interval_ms={args.interval} "
        f"correct={not args.no_correct} rba_per={args.rba_per}"
    )
    header = f"{'#':>3} {'keystrokes':>10} {'chars':>6} {'wpm':>9} {'kspc':>9} {'rba':>9}  phrase"
    print(header)
    totals = {"wpm": 0.0, "kspc": 0.0, "rba": 0.0}
    counted = 0
    for i, phrase in enumerate(phrases):
        noise = NoiseModel(sigma_px=args.noise, seed=derive_seed(args.seed, i))
        events = synth_typist(
            layout,
            phrase,
            noise,
            key_interval_ms=args.interval,
            correct_errors=not args.no_correct,
        )
        session = TypingSession(layout=layout, target_phrase=phrase)
        for ev in events:
            typing_step(session, ev)
        m = compute_metrics(session, rba_per=args.rba_per)
        counted += 1
        totals["wpm"] += m.wpm
        totals["kspc"] += m.kspc
        totals["rba"] += m.rba
        print(
            f"{i:>3} {session.keystrokes:>10} {len(session.transcribed):>6} "
            f"{m.wpm:>9.4f} {m.kspc:>9.4f} {m.rba:>9.4f}  {phrase}"
        )
    print(
        f"{'avg':>3} {'':>10} {'':>6} {totals['wpm'] / counted:>9.4f} "
        f"{totals['kspc'] / counted:>9.4f} {totals['rba'] / counted:>9.4f}"
    )
    return 0


def _cmd_replay(args) -> int:
    events, meta = _strokes_from_replay(args.file)
    params: dict = {}
    if args.mode == "gesture":
        if not args.store:
            return _fail("gesture replay needs --store")
        store = load_store(args.store)
        if not store.templates:
            return _fail(f"template store is empty: {args.store}")
        params = {
            "templates": [
                {"name": t.name, "action_id": t.action_id, "points": [[x, y] for x, y in t.points]}
                for t in store.templates
            ],
            "n": store.n,
            "reject_threshold": store.reject_threshold,
            "source": args.source,
        }
    elif args.mode == "auth":
        if not args.password:
            return _fail("auth replay needs --password (comma-separated shape ids)")
        params = {
            "seed": args.seed,
            "password": args.password.split(","),
            "screen_w": meta.screen_w,
            "screen_h": meta.screen_h,
        }
    elif args.mode == "typing":
        params = {"target_phrase": args.phrase or ""}
    for event in run_replay_via_service(args.mode, events, params):
        sys.stdout.buffer.write(canonical_json(event) + b"\n")
    return 0


def _cmd_serve(args) -> int:
    port = args.port if args.port is not None else int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    print(f"gazekit service on {args.host}:{port} (framed TCP + WebSocket)")
    try:
        serve(host=args.host, port=port)
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_bench(args) -> int:
    store = bundled.bundled_template_store()
    names = store.names()
    rng = SplitMix64(0xB3)
    trials = []
    for i in range(args.trials):
        t = store.templates[i % len(names)]
        noise = NoiseModel(sigma_px=0.02 * 400.0, seed=i)
        trials.append(synth_gesture(t, 400.0, (960.0, 540.0), noise))
    t0 = time.perf_counter()
    hits = sum(1 for gp in trials if recognize(store, gp) is not None)
    dt = time.perf_counter() - t0
    print(f"recognize: {args.trials} paths in {dt:.3f}s ({args.trials / dt:.0f}/s), {hits} matched")

    config = AuthConfig()
    trajectories = gen_trajectories(config, 1)
    streams = []
    for i in range(args.trials):
        traj = trajectories[i % len(trajectories)]
        streams.append(
            (synth_follow(traj, config.epoch_ms, 60, NoiseModel(sigma_px=15, seed=i)), traj)
        )
    t0 = time.perf_counter()
    correct = 0
    for samples, traj in streams:
        match = match_epoch(samples, trajectories, (0, config.epoch_ms), config)
        correct += match.winner == traj.shape_id
    dt = time.perf_counter() - t0
    print(
        f"match_epoch: {args.trials} epochs in {dt:.3f}s ({args.trials / dt:.0f}/s), "
        f"{correct} matched"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="build a template store from a sample-paths file")
    p.add_argument("--paths", required=True, help="paths file: name action_id x1 y1 ...")
    p.add_argument("--out", required=True, help="output template store file")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--threshold", type=float, default=0.75)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("recognize", help="recognize trigger-delimited strokes in a replay file")
    p.add_argument("--store", required=True)
    p.add_argument("--replay", required=True)
    p.add_argument("--source", choices=["raw-samples", "fixation-centroids"], default="raw-samples")
    p.add_argument("--dispersion", type=float, default=40.0)
    p.add_argument("--min-duration", type=int, default=100)
    p.set_defaults(func=_cmd_recognize)

    p = sub.add_parser("auth-sim", help="seeded pursuit-authentication accuracy simulation")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--seed0", type=int, default=1)
    p.add_argument("--noise", type=float, default=15.0)
    p.add_argument("--latency", type=int, default=0)
    p.add_argument("--rate", type=float, default=60.0)
    p.add_argument("--disturb", type=float, default=30.0, help="calibration offset px (0 = off)")
    p.add_argument("--shapes", type=int, default=6)
    p.add_argument("--epoch-ms", type=int, default=1500)
    p.add_argument("--inter-epoch-ms", type=int, default=250)
    p.add_argument("--password-length", type=int, default=4)
    p.add_argument("--out-dir", default=None, help="write per-session transcripts here")
    p.set_defaults(func=_cmd_auth_sim)

    p = sub.add_parser("type-sim", help="synthetic typist metrics over a phrase set")
    p.add_argument("--phrases", default=None, help="phrase file (default: bundled set)")
    p.add_argument("--layout", default=None, help="layout file (default: bundled QWERTY)")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--interval", type=int, default=250)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--no-correct", action="store_true")
    p.add_argument("--rba-per", choices=["keystrokes", "characters"], default="keystrokes")
    p.set_defaults(func=_cmd_type_sim)

    p = sub.add_parser("replay", help="run a replay file through a service session")
    p.add_argument("--file", required=True)
    p.add_argument("--mode", choices=["arbiter", "gesture", "typing", "auth"], required=True)
    p.add_argument("--store", default=None)
    p.add_argument("--source", choices=["raw-samples", "fixation-centroids"], default="raw-samples")
    p.add_argument("--password", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phrase", default=None)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("serve", help="start the session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None, help=f"default ${PORT_ENV_VAR} or {DEFAULT_PORT}")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("bench", help="timing of recognition and epoch matching")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
