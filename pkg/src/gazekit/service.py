"""Session service: live gesture / auth / typing / arbiter sessions over a
framed JSON message channel.

Wire format: each frame is one UTF-8 JSON object with a mandatory ``type``
field, length-prefixed with a 4-byte big-endian size.  The same port also
accepts browser WebSocket connections (the listener sniffs the HTTP
upgrade request) carrying one JSON object per text frame.

The server never consults its own clock: sessions are driven entirely by
client-supplied ``t_ms``, which keeps every outcome reproducible from a
replay file.  Engine results flow out as events; feeding the same events
through the module APIs directly yields byte-identical payloads (see
``run_replay_direct``), which is the service's core correctness contract.

Message catalog (one example each):

    -> {"type":"hello"}
    <- {"type":"hello_ok","version":1,"capabilities":["arbiter","gesture","typing","auth"]}

    -> {"type":"start_session","mode":"auth","seed":7,"password":["s0","s1","s2","s3"]}
    <- {"type":"session_started","session_id":"s1","mode":"auth", ...trajectories...}

    -> {"type":"sample","session_id":"s1","t_ms":16,"x":412.0,"y":300.5,"valid":true}
    <- (zero or more events, e.g. {"type":"epoch_result",...})

    -> {"type":"trigger","session_id":"s1","t_ms":120,"kind":"press"}
    <- (e.g. {"type":"pointer_action","kind":"hold_start",...})

    -> {"type":"train_gesture","session_id":"s1","name":"zig","action_id":"page.refresh"}
    <- {"type":"train_armed","session_id":"s1","name":"zig"}

    -> {"type":"get_store","session_id":"s1"}
    <- {"type":"store_ok","session_id":"s1","n":64,...}

    -> {"type":"debug_position","session_id":"s1","shape_id":"s0","t_ms":250}
    <- {"type":"debug_position_ok","session_id":"s1","x":613.2,"y":540.0}

    -> {"type":"end_session","session_id":"s1"}
    <- {"type":"session_ended","session_id":"s1", ...mode summary...}

    <- {"type":"error","code":"UnknownSession","detail":"..."}
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import struct

from . import bundled
from .arbiter import (
    ACTION_NAMES,
    Arbiter,
    ArbiterConfig,
    NoGazeFix,
    PointerAction,
    ProtocolViolation,
    TargetRect,
    TriggerEvent,
    resolve_target,
)
from .auth import (
    ABORT,
    ACCEPT,
    REJECT,
    AuthConfig,
    InsufficientGaze,
    ShapeTrajectory,
    evaluate_epoch,
    gen_trajectories,
    run_auth_session,
    shape_position,
)
from .core import GazeSample, NonMonotonicTimestamp, detect_fixations
from .gestures import (
    DegeneratePath,
    DuplicateName,
    GesturePath,
    GestureTemplate,
    SOURCE_FIXATIONS,
    SOURCE_RAW,
    TemplateStore,
    recognize,
    train_template,
)
from .keyboard import (
    EmptySession,
    KeyboardLayout,
    TypingSession,
    compute_metrics,
    parse_layout,
    typing_step,
)

PROTOCOL_VERSION = 1
CAPABILITIES = ("arbiter", "gesture", "typing", "auth")
DEFAULT_PORT = 7317
PORT_ENV_VAR = "PURSUIT_PORT"
MAX_FRAME_BYTES = 8 * 1024 * 1024


def _json_safe(value):
    if isinstance(value, float) and (value != value or value in (float("inf"), float("-inf"))):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def canonical_json(obj) -> bytes:
    """Stable byte encoding used for events and equivalence checks."""
    return json.dumps(
        _json_safe(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


class ServiceError(Exception):
    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.detail = detail


def _err(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


# ---------------------------------------------------------------------------
# payload builders shared by the engines and the direct-API equivalence path
# ---------------------------------------------------------------------------

def action_payload(sid: str, action: PointerAction, targets: list[TargetRect]) -> dict:
    return {
        "type": "pointer_action",
        "session_id": sid,
        "kind": ACTION_NAMES[action.kind],
        "x": action.x,
        "y": action.y,
        "t_ms": action.t_ms,
        "target": resolve_target(action.x, action.y, targets),
    }


def gesture_result_payload(sid: str, index: int, t_ms: int, result, error: str | None) -> dict:
    match = None
    if result is not None:
        match = {
            "name": result.template_name,
            "action_id": result.action_id,
            "score": result.score,
            "distance": result.distance,
        }
    return {
        "type": "gesture_result",
        "session_id": sid,
        "index": index,
        "t_ms": t_ms,
        "match": match,
        "error": error,
    }


def key_selected_payload(sid: str, t_ms: int, key_id: str | None, transcribed: str) -> dict:
    return {
        "type": "key_selected",
        "session_id": sid,
        "t_ms": t_ms,
        "key_id": key_id,
        "transcribed": transcribed,
    }


def epoch_result_payload(sid: str, result) -> dict:
    return {
        "type": "epoch_result",
        "session_id": sid,
        "index": result.index,
        "winner": result.winner,
        "distances": dict(sorted(result.distances.items())),
        "matched": result.matched,
    }


def trajectory_payload(traj: ShapeTrajectory) -> dict:
    return {
        "shape_id": traj.shape_id,
        "kind": traj.kind,
        "cx": traj.cx,
        "cy": traj.cy,
        "amp_x": traj.amp_x,
        "amp_y": traj.amp_y,
        "omega": traj.omega,
        "phase": traj.phase,
        "ratio_x": traj.ratio_x,
        "ratio_y": traj.ratio_y,
    }


def template_payload(t: GestureTemplate) -> dict:
    return {
        "name": t.name,
        "action_id": t.action_id,
        "points": [[x, y] for x, y in t.points],
    }


def _parse_trigger(msg: dict) -> TriggerEvent:
    kind = msg.get("kind")
    if kind not in ("press", "release"):
        raise ServiceError("ProtocolViolation", f"trigger kind must be press/release, got {kind!r}")
    return TriggerEvent(t_ms=int(msg["t_ms"]), kind=kind)


def _parse_sample(msg: dict) -> GazeSample:
    try:
        return GazeSample(
            t_ms=int(msg["t_ms"]),
            x=float(msg.get("x", 0.0)),
            y=float(msg.get("y", 0.0)),
            valid=bool(msg.get("valid", True)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ServiceError("ProtocolViolation", f"bad sample fields: {exc}") from exc


class _MonotonicGuard:
    """Shared strictly-increasing t_ms check for per-session sample streams."""

    def __init__(self):
        self.last = None

    def check(self, t_ms: int) -> None:
        if self.last is not None and t_ms <= self.last:
            raise ServiceError(
                "NonMonotonicTimestamp", f"sample t_ms {t_ms} does not advance past {self.last}"
            )
        self.last = t_ms


# ---------------------------------------------------------------------------
# session engines
# ---------------------------------------------------------------------------

class ArbiterEngine:
    mode = "arbiter"

    def __init__(self, sid: str, params: dict):
        cfg = ArbiterConfig(
            double_click_window_ms=int(params.get("double_click_window_ms", 400)),
            hold_threshold_ms=int(params.get("hold_threshold_ms", 300)),
        )
        self.sid = sid
        self.arbiter = Arbiter(cfg)
        self.targets = [
            TargetRect(
                str(t["id"]), float(t["x"]), float(t["y"]), float(t["w"]), float(t["h"])
            )
            for t in params.get("targets", [])
        ]
        self.guard = _MonotonicGuard()
        self.actions: list[dict] = []

    def started_payload(self) -> dict:
        return {
            "double_click_window_ms": self.arbiter.config.double_click_window_ms,
            "hold_threshold_ms": self.arbiter.config.hold_threshold_ms,
            "targets": [
                {"id": t.target_id, "x": t.x, "y": t.y, "w": t.w, "h": t.h}
                for t in self.targets
            ],
        }

    def _emit(self, actions) -> list[dict]:
        events = [action_payload(self.sid, a, self.targets) for a in actions]
        self.actions.extend(events)
        return events

    def on_sample(self, sample: GazeSample) -> list[dict]:
        self.guard.check(sample.t_ms)
        return self._emit(self.arbiter.step(sample))

    def on_trigger(self, trig: TriggerEvent) -> list[dict]:
        return self._emit(self.arbiter.step(trig))

    def end(self) -> tuple[list[dict], dict]:
        events = self._emit(self.arbiter.finish())
        summary = {"mode": self.mode, "actions": self.actions}
        return events, summary


class GestureEngine:
    mode = "gesture"

    def __init__(self, sid: str, params: dict):
        self.sid = sid
        store_spec = params.get("store")
        if store_spec == "bundled":
            self.store = bundled.bundled_template_store(
                n=int(params.get("n", 64)),
                reject_threshold=float(params.get("reject_threshold", 0.75)),
            )
        else:
            self.store = TemplateStore(
                n=int(params.get("n", 64)),
                reject_threshold=float(params.get("reject_threshold", 0.75)),
            )
            for t in params.get("templates", []):
                self.store.templates.append(
                    GestureTemplate(
                        name=str(t["name"]),
                        action_id=str(t["action_id"]),
                        points=tuple((float(x), float(y)) for x, y in t["points"]),
                    )
                )
        source = params.get("source", SOURCE_FIXATIONS)
        if source not in (SOURCE_FIXATIONS, SOURCE_RAW):
            raise ServiceError("ProtocolViolation", f"unknown gesture source {source!r}")
        self.source = source
        self.dispersion_px = float(params.get("dispersion_px", 40.0))
        self.min_duration_ms = int(params.get("min_duration_ms", 100))
        self.guard = _MonotonicGuard()
        self.gaze: GazeSample | None = None
        self.capturing = False
        self.buffer: list[GazeSample] = []
        self.pressed = False
        self.train_next: tuple[str, str] | None = None
        self.results: list[dict] = []
        self.stroke_index = 0

    def started_payload(self) -> dict:
        return {
            "n": self.store.n,
            "reject_threshold": self.store.reject_threshold,
            "source": self.source,
            "template_names": self.store.names(),
        }

    def arm_training(self, name: str, action_id: str) -> dict:
        self.train_next = (name, action_id)
        return {"type": "train_armed", "session_id": self.sid, "name": name}

    def store_payload(self) -> dict:
        return {
            "type": "store_ok",
            "session_id": self.sid,
            "n": self.store.n,
            "reject_threshold": self.store.reject_threshold,
            "templates": [template_payload(t) for t in self.store.templates],
        }

    def on_sample(self, sample: GazeSample) -> list[dict]:
        self.guard.check(sample.t_ms)
        if sample.valid:
            self.gaze = sample
            if self.capturing:
                self.buffer.append(sample)
        return []

    def _stroke_path(self) -> GesturePath:
        if self.source == SOURCE_RAW:
            return GesturePath(tuple((s.x, s.y) for s in self.buffer), SOURCE_RAW)
        fixations = detect_fixations(self.buffer, self.dispersion_px, self.min_duration_ms)
        return GesturePath(tuple((f.cx, f.cy) for f in fixations), SOURCE_FIXATIONS)

    def on_trigger(self, trig: TriggerEvent) -> list[dict]:
        if trig.kind == "press":
            if self.pressed:
                raise ServiceError("ProtocolViolation", "press while a press is active")
            self.pressed = True
            self.capturing = True
            self.buffer = [self.gaze] if self.gaze is not None else []
            return []
        if not self.pressed:
            raise ServiceError("ProtocolViolation", "release without a press")
        self.pressed = False
        self.capturing = False
        index = self.stroke_index
        self.stroke_index += 1
        if self.train_next is not None:
            name, action_id = self.train_next
            self.train_next = None
            try:
                template = train_template(self.store, name, [self._stroke_path()], action_id)
            except (DegeneratePath, DuplicateName, ValueError) as exc:
                return [
                    {
                        "type": "gesture_trained",
                        "session_id": self.sid,
                        "name": name,
                        "ok": False,
                        "error": str(exc),
                    }
                ]
            return [
                {
                    "type": "gesture_trained",
                    "session_id": self.sid,
                    "name": template.name,
                    "action_id": template.action_id,
                    "ok": True,
                }
            ]
        try:
            result = recognize(self.store, self._stroke_path())
            event = gesture_result_payload(self.sid, index, trig.t_ms, result, None)
        except DegeneratePath as exc:
            event = gesture_result_payload(self.sid, index, trig.t_ms, None, str(exc))
        self.results.append(event)
        return [event]

    def end(self) -> tuple[list[dict], dict]:
        return [], {"mode": self.mode, "results": self.results}


class TypingEngine:
    mode = "typing"

    def __init__(self, sid: str, params: dict):
        self.sid = sid
        layout_text = params.get("layout")
        layout = parse_layout(layout_text) if layout_text else bundled.default_layout()
        self.session = TypingSession(layout=layout, target_phrase=str(params.get("target_phrase", "")))
        self.guard = _MonotonicGuard()
        self.pressed = False
        self.selections: list[dict] = []

    def started_payload(self) -> dict:
        return {
            "target_phrase": self.session.target_phrase,
            "keys": [
                {
                    "key_id": k.key_id,
                    "label": k.label,
                    "output": k.output,
                    "x": k.x,
                    "y": k.y,
                    "w": k.w,
                    "h": k.h,
                }
                for k in self.session.layout.keys
            ],
        }

    def on_sample(self, sample: GazeSample) -> list[dict]:
        self.guard.check(sample.t_ms)
        typing_step(self.session, sample)
        return []

    def on_trigger(self, trig: TriggerEvent) -> list[dict]:
        if trig.kind == "press":
            if self.pressed:
                raise ServiceError("ProtocolViolation", "press while a press is active")
            self.pressed = True
        else:
            if not self.pressed:
                raise ServiceError("ProtocolViolation", "release without a press")
            self.pressed = False
        before = len(self.session.log)
        typing_step(self.session, trig)
        if len(self.session.log) > before:
            stroke = self.session.log[-1]
            event = key_selected_payload(
                self.sid, stroke.t_ms, stroke.key_id, self.session.transcribed
            )
            self.selections.append(event)
            return [event]
        return []

    def end(self) -> tuple[list[dict], dict]:
        summary: dict = {
            "mode": self.mode,
            "transcribed": self.session.transcribed,
            "target_phrase": self.session.target_phrase,
            "keystrokes": self.session.keystrokes,
            "backspaces": self.session.backspaces,
        }
        try:
            m = compute_metrics(self.session)
            summary["metrics"] = {"wpm": m.wpm, "kspc": m.kspc, "rba": m.rba}
        except EmptySession:
            summary["metrics"] = None
        return [], summary


class AuthEngine:
    mode = "auth"

    def __init__(self, sid: str, params: dict):
        self.sid = sid
        cfg_fields = {}
        for name in (
            "shape_count",
            "epoch_ms",
            "inter_epoch_ms",
            "password_length",
            "lag_min_ms",
            "lag_max_ms",
            "lag_step_ms",
            "screen_w",
            "screen_h",
        ):
            if name in params:
                cfg_fields[name] = int(params[name])
        if "accept_margin" in params:
            cfg_fields["accept_margin"] = float(params["accept_margin"])
        password = [str(p) for p in params.get("password", [])]
        if password and "password_length" not in cfg_fields:
            cfg_fields["password_length"] = len(password)
        try:
            self.config = AuthConfig(**cfg_fields)
        except ValueError as exc:
            raise ServiceError("ProtocolViolation", f"bad auth config: {exc}") from exc
        self.seed = int(params.get("seed", 0))
        self.trajectories = gen_trajectories(self.config, self.seed)
        ids = {t.shape_id for t in self.trajectories}
        if len(password) != self.config.password_length or any(p not in ids for p in password):
            raise ServiceError(
                "ProtocolViolation",
                f"password must list {self.config.password_length} of {sorted(ids)}",
            )
        self.password = password
        self.guard = _MonotonicGuard()
        self.samples: list[GazeSample] = []
        self.next_epoch = 0
        self.aborted_at: int | None = None
        self.epoch_events: list[dict] = []

    def started_payload(self) -> dict:
        return {
            "seed": self.seed,
            "password_length": self.config.password_length,
            "epoch_ms": self.config.epoch_ms,
            "inter_epoch_ms": self.config.inter_epoch_ms,
            "nominal_duration_ms": self.config.nominal_duration_ms,
            "lag_grid_ms": self.config.lag_grid_ms,
            "screen_w": self.config.screen_w,
            "screen_h": self.config.screen_h,
            "trajectories": [trajectory_payload(t) for t in self.trajectories],
        }

    def debug_position(self, shape_id: str, t_ms: float) -> dict:
        for traj in self.trajectories:
            if traj.shape_id == shape_id:
                x, y = shape_position(traj, t_ms)
                return {
                    "type": "debug_position_ok",
                    "session_id": self.sid,
                    "shape_id": shape_id,
                    "t_ms": t_ms,
                    "x": x,
                    "y": y,
                }
        raise ServiceError("ProtocolViolation", f"unknown shape {shape_id}")

    def _evaluate_ready(self, up_to_ms: int | None) -> list[dict]:
        """Emit epoch results for every window that is complete in the buffer."""
        events = []
        while self.next_epoch < self.config.password_length and self.aborted_at is None:
            window_end = self.config.epoch_window(self.next_epoch)[1]
            if up_to_ms is not None and up_to_ms < window_end:
                break
            try:
                result = evaluate_epoch(
                    self.samples,
                    self.trajectories,
                    self.next_epoch,
                    self.config,
                    self.password[self.next_epoch],
                )
            except InsufficientGaze:
                self.aborted_at = self.next_epoch
                break
            event = epoch_result_payload(self.sid, result)
            self.epoch_events.append(event)
            events.append(event)
            self.next_epoch += 1
        return events

    def on_sample(self, sample: GazeSample) -> list[dict]:
        self.guard.check(sample.t_ms)
        self.samples.append(sample)
        return self._evaluate_ready(sample.t_ms)

    def on_trigger(self, trig: TriggerEvent) -> list[dict]:
        return []  # pursuit sessions are driven by gaze alone

    def end(self) -> tuple[list[dict], dict]:
        events = self._evaluate_ready(None)
        if self.aborted_at is not None:
            outcome = ABORT
            wall_ms = self.config.epoch_window(self.aborted_at)[1]
        else:
            outcome = (
                ACCEPT
                if all(e["matched"] for e in self.epoch_events)
                and len(self.epoch_events) == self.config.password_length
                else REJECT
            )
            wall_ms = self.config.nominal_duration_ms
        summary = {
            "mode": self.mode,
            "outcome": outcome,
            "wall_ms": wall_ms,
            "epochs": self.epoch_events,
        }
        return events, summary


_ENGINES = {
    "arbiter": ArbiterEngine,
    "gesture": GestureEngine,
    "typing": TypingEngine,
    "auth": AuthEngine,
}


class ServiceState:
    """All live sessions; deterministic session id allocation."""

    def __init__(self):
        self.sessions: dict[str, object] = {}
        self._counter = 0

    def new_id(self) -> str:
        self._counter += 1
        return f"s{self._counter}"


def handle_message(state: ServiceState, msg) -> list[dict]:
    """Process one message; returns replies/events (state unchanged on error)."""
    if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
        return [_err("ProtocolViolation", "message must be an object with a string 'type'")]
    mtype = msg["type"]

    if mtype == "hello":
        return [
            {
                "type": "hello_ok",
                "version": PROTOCOL_VERSION,
                "capabilities": list(CAPABILITIES),
            }
        ]

    if mtype == "start_session":
        mode = msg.get("mode")
        if mode not in _ENGINES:
            return [_err("ProtocolViolation", f"unknown mode {mode!r}")]
        sid = state.new_id()
        try:
            engine = _ENGINES[mode](sid, msg)
        except ServiceError as exc:
            state._counter -= 1  # failed start allocates nothing
            return [_err(exc.code, exc.detail)]
        state.sessions[sid] = engine
        payload = {"type": "session_started", "session_id": sid, "mode": mode}
        payload.update(engine.started_payload())
        return [payload]

    if mtype in ("sample", "trigger", "end_session", "train_gesture", "get_store", "debug_position"):
        sid = msg.get("session_id")
        engine = state.sessions.get(sid)
        if engine is None:
            return [_err("UnknownSession", f"no session {sid!r}")]
        try:
            if mtype == "sample":
                return engine.on_sample(_parse_sample(msg))
            if mtype == "trigger":
                return engine.on_trigger(_parse_trigger(msg))
            if mtype == "train_gesture":
                if not isinstance(engine, GestureEngine):
                    return [_err("ProtocolViolation", "train_gesture needs a gesture session")]
                return [engine.arm_training(str(msg["name"]), str(msg["action_id"]))]
            if mtype == "get_store":
                if not isinstance(engine, GestureEngine):
                    return [_err("ProtocolViolation", "get_store needs a gesture session")]
                return [engine.store_payload()]
            if mtype == "debug_position":
                if not isinstance(engine, AuthEngine):
                    return [_err("ProtocolViolation", "debug_position needs an auth session")]
                return [engine.debug_position(str(msg["shape_id"]), float(msg["t_ms"]))]
            # end_session
            events, summary = engine.end()
            del state.sessions[sid]
            ended = {"type": "session_ended", "session_id": sid}
            ended.update(summary)
            return events + [ended]
        except ServiceError as exc:
            return [_err(exc.code, exc.detail)]
        except (NoGazeFix, ProtocolViolation, NonMonotonicTimestamp, InsufficientGaze) as exc:
            return [_err(type(exc).__name__, str(exc))]
        except (KeyError, TypeError, ValueError) as exc:
            return [_err("ProtocolViolation", f"bad payload: {exc}")]

    return [_err("UnknownType", f"unknown message type {mtype!r}")]


# ---------------------------------------------------------------------------
# direct-API equivalence path: the same replay stream evaluated without the
# service, producing the exact payload dicts the engines would emit
# ---------------------------------------------------------------------------

def run_replay_direct(mode: str, events, params: dict, sid: str = "s1") -> list[dict]:
    """Module-API evaluation of a replay event stream, payload-compatible
    with the service path so the two can be compared byte for byte."""
    out: list[dict] = []
    if mode == "arbiter":
        cfg = ArbiterConfig(
            double_click_window_ms=int(params.get("double_click_window_ms", 400)),
            hold_threshold_ms=int(params.get("hold_threshold_ms", 300)),
        )
        targets = [
            TargetRect(str(t["id"]), float(t["x"]), float(t["y"]), float(t["w"]), float(t["h"]))
            for t in params.get("targets", [])
        ]
        arb = Arbiter(cfg)
        actions: list[dict] = []
        for ev in events:
            actions.extend(action_payload(sid, a, targets) for a in arb.step(ev))
        actions.extend(action_payload(sid, a, targets) for a in arb.finish())
        out.extend(actions)
        out.append(
            {"type": "session_ended", "session_id": sid, "mode": "arbiter", "actions": actions}
        )
        return out

    if mode == "typing":
        layout_text = params.get("layout")
        layout = parse_layout(layout_text) if layout_text else bundled.default_layout()
        session = TypingSession(layout=layout, target_phrase=str(params.get("target_phrase", "")))
        selections: list[dict] = []
        for ev in events:
            before = len(session.log)
            typing_step(session, ev)
            if len(session.log) > before:
                stroke = session.log[-1]
                selections.append(
                    key_selected_payload(sid, stroke.t_ms, stroke.key_id, session.transcribed)
                )
        out.extend(selections)
        try:
            m = compute_metrics(session)
            metrics = {"wpm": m.wpm, "kspc": m.kspc, "rba": m.rba}
        except EmptySession:
            metrics = None
        out.append(
            {
                "type": "session_ended",
                "session_id": sid,
                "mode": "typing",
                "transcribed": session.transcribed,
                "target_phrase": session.target_phrase,
                "keystrokes": session.keystrokes,
                "backspaces": session.backspaces,
                "metrics": metrics,
            }
        )
        return out

    if mode == "gesture":
        if params.get("store") == "bundled":
            store = bundled.bundled_template_store(
                n=int(params.get("n", 64)),
                reject_threshold=float(params.get("reject_threshold", 0.75)),
            )
        else:
            store = TemplateStore(
                n=int(params.get("n", 64)),
                reject_threshold=float(params.get("reject_threshold", 0.75)),
            )
            for t in params.get("templates", []):
                store.templates.append(
                    GestureTemplate(
                        name=str(t["name"]),
                        action_id=str(t["action_id"]),
                        points=tuple((float(x), float(y)) for x, y in t["points"]),
                    )
                )
        source = params.get("source", SOURCE_FIXATIONS)
        gaze = None
        capturing = False
        buffer: list[GazeSample] = []
        results: list[dict] = []
        index = 0
        for ev in events:
            if isinstance(ev, GazeSample):
                if ev.valid:
                    gaze = ev
                    if capturing:
                        buffer.append(ev)
            elif ev.kind == "press":
                capturing = True
                buffer = [gaze] if gaze is not None else []
            else:
                capturing = False
                if source == SOURCE_RAW:
                    path = GesturePath(tuple((s.x, s.y) for s in buffer), SOURCE_RAW)
                else:
                    fixes = detect_fixations(
                        buffer,
                        float(params.get("dispersion_px", 40.0)),
                        int(params.get("min_duration_ms", 100)),
                    )
                    path = GesturePath(tuple((f.cx, f.cy) for f in fixes), SOURCE_FIXATIONS)
                try:
                    result = recognize(store, path)
                    results.append(gesture_result_payload(sid, index, ev.t_ms, result, None))
                except DegeneratePath as exc:
                    results.append(gesture_result_payload(sid, index, ev.t_ms, None, str(exc)))
                index += 1
        out.extend(results)
        out.append(
            {"type": "session_ended", "session_id": sid, "mode": "gesture", "results": results}
        )
        return out

    if mode == "auth":
        cfg_fields = {}
        for name in (
            "shape_count",
            "epoch_ms",
            "inter_epoch_ms",
            "password_length",
            "lag_min_ms",
            "lag_max_ms",
            "lag_step_ms",
            "screen_w",
            "screen_h",
        ):
            if name in params:
                cfg_fields[name] = int(params[name])
        if "accept_margin" in params:
            cfg_fields["accept_margin"] = float(params["accept_margin"])
        password = [str(p) for p in params.get("password", [])]
        if password and "password_length" not in cfg_fields:
            cfg_fields["password_length"] = len(password)
        config = AuthConfig(**cfg_fields)
        samples = [ev for ev in events if isinstance(ev, GazeSample)]
        session = run_auth_session(samples, config, int(params.get("seed", 0)), password)
        epoch_events = [epoch_result_payload(sid, r) for r in session.epochs]
        out.extend(epoch_events)
        out.append(
            {
                "type": "session_ended",
                "session_id": sid,
                "mode": "auth",
                "outcome": session.outcome,
                "wall_ms": session.wall_ms,
                "epochs": epoch_events,
            }
        )
        return out

    raise ValueError(f"unknown mode {mode}")


def run_replay_via_service(mode: str, events, params: dict) -> list[dict]:
    """Drive a fresh in-process service with the replay stream."""
    state = ServiceState()
    start = {"type": "start_session", "mode": mode}
    start.update(params)
    replies = handle_message(state, start)
    if replies[0]["type"] != "session_started":
        raise RuntimeError(f"session failed to start: {replies[0]}")
    sid = replies[0]["session_id"]
    out: list[dict] = []
    for ev in events:
        if isinstance(ev, GazeSample):
            msg = {
                "type": "sample",
                "session_id": sid,
                "t_ms": ev.t_ms,
                "x": ev.x,
                "y": ev.y,
                "valid": ev.valid,
            }
        else:
            msg = {"type": "trigger", "session_id": sid, "t_ms": ev.t_ms, "kind": ev.kind}
        out.extend(handle_message(state, msg))
    out.extend(handle_message(state, {"type": "end_session", "session_id": sid}))
    return out


# ---------------------------------------------------------------------------
# transports: length-framed TCP and minimal server-side WebSocket (RFC 6455),
# sniffed on the same listening port
# ---------------------------------------------------------------------------

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


def _ws_accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _ws_encode_text(payload: bytes) -> bytes:
    header = bytearray([0x81])  # FIN + text opcode
    n = len(payload)
    if n < 126:
        header.append(n)
    elif n < 1 << 16:
        header.append(126)
        header += struct.pack(">H", n)
    else:
        header.append(127)
        header += struct.pack(">Q", n)
    return bytes(header) + payload


class _BufferedReader:
    """StreamReader shim that drains leftover handshake bytes first."""

    def __init__(self, reader, pending: bytes):
        self._reader = reader
        self._pending = pending

    async def readexactly(self, n: int) -> bytes:
        if self._pending:
            if len(self._pending) >= n:
                out, self._pending = self._pending[:n], self._pending[n:]
                return out
            need = n - len(self._pending)
            out = self._pending + await self._reader.readexactly(need)
            self._pending = b""
            return out
        return await self._reader.readexactly(n)


async def _ws_read_frame(reader) -> tuple[int, bytes] | None:
    try:
        head = await reader.readexactly(2)
    except (asyncio.IncompleteReadError, ConnectionError):
        return None
    opcode = head[0] & 0x0F
    masked = head[1] & 0x80
    length = head[1] & 0x7F
    if length == 126:
        length = struct.unpack(">H", await reader.readexactly(2))[0]
    elif length == 127:
        length = struct.unpack(">Q", await reader.readexactly(8))[0]
    if length > MAX_FRAME_BYTES:
        return None
    mask = await reader.readexactly(4) if masked else b"\x00\x00\x00\x00"
    data = await reader.readexactly(length) if length else b""
    if masked:
        data = bytes(b ^ mask[i % 4] for i, b in enumerate(data))
    return opcode, data


class SessionServer:
    """Asyncio server speaking both framings on one port."""

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        self.host = host
        self.port = port
        self.state = ServiceState()
        self._server: asyncio.AbstractServer | None = None

    def _respond(self, raw: bytes) -> list[bytes]:
        try:
            msg = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            return [canonical_json(_err("ProtocolViolation", f"bad frame: {exc}"))]
        return [canonical_json(reply) for reply in handle_message(self.state, msg)]

    async def _serve_framed(self, reader, writer, first: bytes) -> None:
        buffer = first
        while True:
            while len(buffer) < 4:
                chunk = await reader.read(65536)
                if not chunk:
                    return
                buffer += chunk
            (length,) = struct.unpack(">I", buffer[:4])
            if length > MAX_FRAME_BYTES:
                reply = canonical_json(_err("ProtocolViolation", f"frame too large: {length}"))
                writer.write(struct.pack(">I", len(reply)) + reply)
                await writer.drain()
                return
            while len(buffer) < 4 + length:
                chunk = await reader.read(65536)
                if not chunk:
                    return
                buffer += chunk
            raw, buffer = buffer[4 : 4 + length], buffer[4 + length :]
            for reply in self._respond(raw):
                writer.write(struct.pack(">I", len(reply)) + reply)
            await writer.drain()

    async def _serve_websocket(self, reader, writer, first: bytes) -> None:
        data = first
        while b"\r\n\r\n" not in data:
            chunk = await reader.read(65536)
            if not chunk:
                return
            data += chunk
        head, _, rest = data.partition(b"\r\n\r\n")
        headers = {}
        for line in head.decode("latin-1").split("\r\n")[1:]:
            if ":" in line:
                k, v = line.split(":", 1)
                headers[k.strip().lower()] = v.strip()
        key = headers.get("sec-websocket-key")
        if not key or "websocket" not in headers.get("upgrade", "").lower():
            writer.write(b"HTTP/1.1 400 Bad Request\r\nConnection: close\r\n\r\n")
            await writer.drain()
            return
        writer.write(
            (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\n"
                "Connection: Upgrade\r\n"
                f"Sec-WebSocket-Accept: {_ws_accept_key(key)}\r\n\r\n"
            ).encode("ascii")
        )
        await writer.drain()
        ws_reader = _BufferedReader(reader, rest)
        while True:
            frame = await _ws_read_frame(ws_reader)
            if frame is None:
                return
            opcode, payload = frame
            if opcode == 0x8:  # close
                writer.write(bytes([0x88, 0]))
                await writer.drain()
                return
            if opcode == 0x9:  # ping -> pong
                writer.write(bytes([0x8A, len(payload) & 0x7F]) + payload)
                await writer.drain()
                continue
            if opcode not in (0x1, 0x2):
                continue
            for reply in self._respond(payload):
                writer.write(_ws_encode_text(reply))
            await writer.drain()

    async def _on_connect(self, reader, writer) -> None:
        try:
            first = await reader.read(4)
            if not first:
                return
            if first.startswith(b"GET"):
                await self._serve_websocket(reader, writer, first)
            else:
                await self._serve_framed(reader, writer, first)
        except (asyncio.IncompleteReadError, ConnectionError):
            pass
        finally:
            try:
                writer.close()
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass

    async def start(self) -> None:
        self._server = await asyncio.start_server(self._on_connect, self.host, self.port)
        if self.port == 0:
            self.port = self._server.sockets[0].getsockname()[1]

    async def serve_forever(self) -> None:
        await self.start()
        async with self._server:
            await self._server.serve_forever()

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()


def serve(host: str = "127.0.0.1", port: int = DEFAULT_PORT) -> None:
    """Blocking entry point used by the CLI."""
    server = SessionServer(host=host, port=port)
    asyncio.run(server.serve_forever())
