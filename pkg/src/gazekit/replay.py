"""Replay file format shared by every module.

UTF-8 text; one header line followed by one record per line, time-ordered:

    gaze 1 <screen_w> <screen_h> <rate_hz>
    s <t_ms> <x> <y> <0|1>
    t <t_ms> <P|R>

Sample coordinates are written with repr so a write/read round trip is
value-exact.  Trigger markers must alternate P/R starting with P.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arbiter import TriggerEvent
from .core import DEFAULT_SCREEN_H, DEFAULT_SCREEN_W, GazeSample


class ParseError(ValueError):
    """Malformed replay input; ``line`` is the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, slots=True)
class ReplayRecord:
    """One replay line: a gaze sample, or a trigger when ``trigger`` is set."""

    t_ms: int
    x: float = 0.0
    y: float = 0.0
    valid: bool = True
    trigger: str | None = None  # "P" | "R"

    @property
    def is_trigger(self) -> bool:
        return self.trigger is not None


@dataclass(frozen=True, slots=True)
class ReplayMeta:
    screen_w: int = DEFAULT_SCREEN_W
    screen_h: int = DEFAULT_SCREEN_H
    rate_hz: float = 0.0


def records_from_events(events) -> list[ReplayRecord]:
    out = []
    for ev in events:
        if isinstance(ev, GazeSample):
            out.append(ReplayRecord(t_ms=ev.t_ms, x=ev.x, y=ev.y, valid=ev.valid))
        elif isinstance(ev, TriggerEvent):
            out.append(ReplayRecord(t_ms=ev.t_ms, trigger="P" if ev.kind == "press" else "R"))
        else:
            raise TypeError(f"not a replayable event: {ev!r}")
    return out


def events_from_records(records: list[ReplayRecord]):
    """Expand records into the GazeSample / TriggerEvent stream they encode."""
    out = []
    for r in records:
        if r.is_trigger:
            out.append(TriggerEvent(t_ms=r.t_ms, kind="press" if r.trigger == "P" else "release"))
        else:
            out.append(GazeSample(t_ms=r.t_ms, x=r.x, y=r.y, valid=r.valid))
    return out


def dump_replay(records: list[ReplayRecord], meta: ReplayMeta = ReplayMeta()) -> str:
    rate = meta.rate_hz
    rate_txt = str(int(rate)) if float(rate).is_integer() else repr(float(rate))
    lines = [f"gaze 1 {meta.screen_w} {meta.screen_h} {rate_txt}"]
    for r in records:
        if r.is_trigger:
            lines.append(f"t {r.t_ms} {r.trigger}")
        else:
            lines.append(f"s {r.t_ms} {r.x!r} {r.y!r} {1 if r.valid else 0}")
    return "\n".join(lines) + "\n"


def parse_replay(text: str) -> tuple[list[ReplayRecord], ReplayMeta]:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "missing header")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "gaze" or head[1] != "1":
        raise ParseError(1, "bad header (want 'gaze 1 <w> <h> <rate>')")
    try:
        meta = ReplayMeta(screen_w=int(head[2]), screen_h=int(head[3]), rate_hz=float(head[4]))
    except ValueError:
        raise ParseError(1, "bad header numbers") from None

    records: list[ReplayRecord] = []
    last_t = None
    expect_press = True
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "s":
            if len(fields) != 5:
                raise ParseError(lineno, "sample record wants 's <t> <x> <y> <0|1>'")
            try:
                t = int(fields[1])
                x = float(fields[2])
                y = float(fields[3])
            except ValueError:
                raise ParseError(lineno, "bad sample numbers") from None
            if fields[4] not in ("0", "1"):
                raise ParseError(lineno, "valid flag must be 0 or 1")
            rec = ReplayRecord(t_ms=t, x=x, y=y, valid=fields[4] == "1")
        elif kind == "t":
            if len(fields) != 3:
                raise ParseError(lineno, "trigger record wants 't <t> <P|R>'")
            try:
                t = int(fields[1])
            except ValueError:
                raise ParseError(lineno, "bad trigger time") from None
            if fields[2] not in ("P", "R"):
                raise ParseError(lineno, "trigger marker must be P or R")
            if (fields[2] == "P") != expect_press:
                raise ParseError(lineno, "trigger markers must alternate P/R")
            expect_press = not expect_press
            rec = ReplayRecord(t_ms=t, trigger=fields[2])
        else:
            raise ParseError(lineno, f"unknown record kind {kind!r}")
        if t < 0:
            raise ParseError(lineno, "negative timestamp")
        if last_t is not None and t < last_t:
            raise ParseError(lineno, "records must be time-ordered")
        last_t = t
        records.append(rec)
    return records, meta


def save_replay(records: list[ReplayRecord], path: str, meta: ReplayMeta = ReplayMeta()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_replay(records, meta))


def load_replay(path: str) -> tuple[list[ReplayRecord], ReplayMeta]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_replay(fh.read())
