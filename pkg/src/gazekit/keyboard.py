"""Dwell-free gaze typing: virtual keyboard model, session log, metrics.

Selection is trigger-committed: the key under the latest valid gaze point
activates on trigger press (release does nothing), so no dwell timers are
involved.  Sessions log every press, including misses over dead space, and
the transcribed text is always exactly the fold of that log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arbiter import NoGazeFix, TriggerEvent
from .core import GazeSample

BACKSPACE = "BACKSPACE"
SPACE = "SPACE"
ENTER = "ENTER"
_CONTROLS = (BACKSPACE, SPACE, ENTER)


class EmptySession(ValueError):
    """Metrics requested for a session with no keystrokes."""


@dataclass(frozen=True, slots=True)
class Key:
    key_id: str
    label: str
    output: str  # single printable character, or BACKSPACE / SPACE / ENTER
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"key {self.key_id} needs positive area")
        if self.output not in _CONTROLS and len(self.output) != 1:
            raise ValueError(f"key {self.key_id}: output must be one character or a control")

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px <= self.x + self.w and self.y <= py <= self.y + self.h


@dataclass(frozen=True)
class KeyboardLayout:
    keys: tuple[Key, ...]

    def __post_init__(self):
        seen = set()
        for k in self.keys:
            if k.key_id in seen:
                raise ValueError(f"duplicate key id {k.key_id}")
            seen.add(k.key_id)
        ks = self.keys
        for i in range(len(ks)):
            for j in range(i + 1, len(ks)):
                a, b = ks[i], ks[j]
                if (
                    a.x < b.x + b.w
                    and b.x < a.x + a.w
                    and a.y < b.y + b.h
                    and b.y < a.y + a.h
                ):
                    raise ValueError(f"keys {a.key_id} and {b.key_id} overlap")

    def get(self, key_id: str) -> Key:
        for k in self.keys:
            if k.key_id == key_id:
                return k
        raise KeyError(key_id)

    def key_for_char(self, ch: str) -> Key:
        """Key producing the given character (space maps to the SPACE key)."""
        want = SPACE if ch == " " else ch
        for k in self.keys:
            if k.output == want:
                return k
        raise KeyError(f"no key outputs {ch!r}")


def key_at(layout: KeyboardLayout, x: float, y: float) -> str | None:
    """Key id under the point, boundaries inclusive; None over dead space."""
    for k in layout.keys:
        if k.contains(x, y):
            return k.key_id
    return None


@dataclass(frozen=True, slots=True)
class Keystroke:
    t_ms: int
    key_id: str | None  # None records a press over no key (a miss)


@dataclass
class TypingSession:
    layout: KeyboardLayout
    target_phrase: str
    log: list[Keystroke] = field(default_factory=list)
    transcribed: str = ""
    _gaze: tuple[float, float] | None = None

    @property
    def keystrokes(self) -> int:
        return len(self.log)

    @property
    def backspaces(self) -> int:
        count = 0
        for ks in self.log:
            if ks.key_id is not None and self.layout.get(ks.key_id).output == BACKSPACE:
                count += 1
        return count


def _apply_key(layout: KeyboardLayout, text: str, key_id: str | None) -> str:
    if key_id is None:
        return text
    out = layout.get(key_id).output
    if out == BACKSPACE:
        return text[:-1]
    if out == SPACE:
        return text + " "
    if out == ENTER:
        return text  # enter commits; it adds nothing to the transcription
    return text + out


def replay_log(layout: KeyboardLayout, log: list[Keystroke]) -> str:
    """Fold the keystroke log back into text (the transcription invariant)."""
    text = ""
    for ks in log:
        text = _apply_key(layout, text, ks.key_id)
    return text


def typing_step(session: TypingSession, event: GazeSample | TriggerEvent) -> TypingSession:
    """Feed one time-ordered event; presses select, releases are ignored."""
    if isinstance(event, GazeSample):
        if event.valid:
            session._gaze = (event.x, event.y)
        return session
    if event.kind != "press":
        return session
    if session._gaze is None:
        raise NoGazeFix("typing press before any valid gaze sample")
    key_id = key_at(session.layout, *session._gaze)
    session.log.append(Keystroke(t_ms=event.t_ms, key_id=key_id))
    session.transcribed = _apply_key(session.layout, session.transcribed, key_id)
    return session


@dataclass(frozen=True, slots=True)
class TypingMetrics:
    wpm: float
    kspc: float
    rba: float


def compute_metrics(session: TypingSession, rba_per: str = "keystrokes") -> TypingMetrics:
    """Standard text-entry metrics over the finished session.

    wpm uses the (|T|-1) convention over the first-to-last keystroke span
    with five characters per word; sessions that never span time or produce
    more than one character report 0.  kspc is keystrokes per transcribed
    character (inf when everything was erased).  rba divides backspace
    presses by all keystrokes, or by transcribed characters when
    ``rba_per="characters"``.
    """
    if not session.log:
        raise EmptySession("no keystrokes")
    if rba_per not in ("keystrokes", "characters"):
        raise ValueError("rba_per must be 'keystrokes' or 'characters'")
    chars = len(session.transcribed)
    strokes = session.keystrokes
    backs = session.backspaces
    span_s = (session.log[-1].t_ms - session.log[0].t_ms) / 1000.0
    if chars <= 1 or span_s <= 0.0:
        wpm = 0.0
    else:
        wpm = (chars - 1) / span_s * 60.0 / 5.0
    kspc = strokes / chars if chars else math.inf
    if rba_per == "keystrokes":
        rba = backs / strokes
    else:
        rba = backs / chars if chars else math.inf
    return TypingMetrics(wpm=wpm, kspc=kspc, rba=rba)


# ---------------------------------------------------------------------------
# layout file format: one key per line,
#   key <id> <label> <output|BACKSPACE|SPACE|ENTER> <x> <y> <w> <h>
# ---------------------------------------------------------------------------

def dump_layout(layout: KeyboardLayout) -> str:
    lines = []
    for k in layout.keys:
        lines.append(
            f"key {k.key_id} {k.label} {k.output} {k.x!r} {k.y!r} {k.w!r} {k.h!r}"
        )
    return "\n".join(lines) + "\n"


def parse_layout(text: str) -> KeyboardLayout:
    keys = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 8 or fields[0] != "key":
            raise ValueError(f"layout line {lineno}: want 'key id label output x y w h'")
        try:
            x, y, w, h = (float(v) for v in fields[4:8])
        except ValueError as exc:
            raise ValueError(f"layout line {lineno}: bad geometry") from exc
        keys.append(Key(fields[1], fields[2], fields[3], x, y, w, h))
    if not keys:
        raise ValueError("layout file has no keys")
    return KeyboardLayout(keys=tuple(keys))


def load_layout(path: str) -> KeyboardLayout:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_layout(fh.read())
