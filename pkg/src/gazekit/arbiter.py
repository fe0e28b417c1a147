"""Gaze-plus-trigger interaction arbitration.

The arbiter fuses a gaze pointer stream with a binary trigger (any press /
release source) and emits pointer actions at the current point of regard,
which is what resolves the Midas-touch ambiguity: gaze only points, the
trigger commits.

Classification rules, driven entirely by event timestamps:

* A press held for at least ``hold_threshold_ms`` becomes a hold:
  ``hold_start`` is emitted at the threshold instant carrying the gaze
  position captured at press time, and the eventual release emits
  ``hold_end`` at the gaze position current then (press-drag-release).
* A shorter press+release is a candidate click.  It is not emitted
  immediately: if the next press starts within ``double_click_window_ms``
  of the candidate's release and itself completes as a candidate click,
  the two collapse into one ``double_click`` (emitted at the second
  release); if the next press becomes a hold instead, the candidate is
  committed as a plain ``click``.  With no press inside the window the
  ``click`` fires when the window expires.
* Every action's coordinates are the latest valid gaze sample at the
  action's defining instant (press for hold_start, release for the rest).

State is a plain tuple and ``arbiter_step`` is a pure function, so event
traces can be branched cheaply; the ``Arbiter`` class wraps the same core
for stateful use.  Deferred emissions (hold threshold crossings, click
window expiries) fire while processing the first event at or past their
deadline; ``arbiter_finish`` flushes a trailing pending click.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .core import GazeSample

CLICK = 0
DOUBLE_CLICK = 1
HOLD_START = 2
HOLD_END = 3

ACTION_NAMES = ("click", "double_click", "hold_start", "hold_end")

PRESS = "press"
RELEASE = "release"


class NoGazeFix(RuntimeError):
    """Trigger press arrived before any valid gaze sample."""


class ProtocolViolation(RuntimeError):
    """Trigger events broke press/release alternation."""


@dataclass(frozen=True, slots=True)
class TriggerEvent:
    t_ms: int
    kind: str  # "press" | "release"


class PointerAction(NamedTuple):
    kind: int  # CLICK / DOUBLE_CLICK / HOLD_START / HOLD_END
    x: float
    y: float
    t_ms: int

    @property
    def kind_name(self) -> str:
        return ACTION_NAMES[self.kind]


@dataclass(frozen=True, slots=True)
class ArbiterConfig:
    double_click_window_ms: int = 400
    hold_threshold_ms: int = 300

    def __post_init__(self):
        if self.double_click_window_ms <= 0 or self.hold_threshold_ms <= 0:
            raise ValueError("arbiter timing constants must be positive")


# State tuple layout (kept flat for cheap copying while branching traces):
#   0 gx, 1 gy, 2 have_gaze     latest valid gaze point
#   3 press_t                   current press time, -1 if none
#   4 press_x, 5 press_y        gaze captured at press
#   6 holding                   current press classified as hold
#   7 pend                      open candidate click, None or
#                               (release_t, x, y, deadline, suspended);
#                               suspended while the next press, which arrived
#                               inside the window, is still unclassified
#   8 sched                     committed clicks awaiting emission, a
#                               time-ordered tuple of (t, x, y); a candidate
#                               lands here when the chained press becomes a
#                               hold before the candidate's window expired
_IDLE = (0.0, 0.0, False, -1, 0.0, 0.0, False, None, ())

ArbiterState = tuple


def initial_state() -> ArbiterState:
    return _IDLE


def arbiter_step(
    state: ArbiterState,
    event: GazeSample | TriggerEvent,
    config: ArbiterConfig,
) -> tuple[ArbiterState, list[PointerAction]]:
    """Advance the arbiter by one time-ordered event; returns emitted actions."""
    gx, gy, hg, pt, px, py, hold, pend, sched = state
    t = event.t_ms
    out: list[PointerAction] = []
    hold_ms = config.hold_threshold_ms
    window_ms = config.double_click_window_ms

    # Fire every deferred emission due at or before this event's time, in
    # deadline order; ties resolve toward the earliest press (committed
    # clicks, then the open candidate, then the current press's hold).
    while True:
        due_kind = -1
        due_t = t + 1
        if sched and sched[0][0] <= t:
            due_kind = 0
            due_t = sched[0][0]
        if pend is not None and not pend[4] and pend[3] <= t and pend[3] < due_t:
            due_kind = 1
            due_t = pend[3]
        if pt >= 0 and not hold and pt + hold_ms <= t and pt + hold_ms < due_t:
            due_kind = 2
        if due_kind < 0:
            break
        if due_kind == 0:
            ct, cx, cy = sched[0]
            out.append(PointerAction(CLICK, cx, cy, ct))
            sched = sched[1:]
        elif due_kind == 1:
            out.append(PointerAction(CLICK, pend[1], pend[2], pend[3]))
            pend = None
        else:
            fire_t = pt + hold_ms
            if pend is not None:
                # the suspended candidate can never double now: commit it,
                # emitting at its window expiry or right here if that passed
                click_t = pend[0] + window_ms
                if click_t <= fire_t:
                    out.append(PointerAction(CLICK, pend[1], pend[2], fire_t))
                else:
                    sched = sched + ((click_t, pend[1], pend[2]),)
                pend = None
            out.append(PointerAction(HOLD_START, px, py, fire_t))
            hold = True

    if type(event) is TriggerEvent:
        if event.kind == PRESS:
            if not hg:
                raise NoGazeFix("trigger press before any valid gaze sample")
            if pt >= 0:
                raise ProtocolViolation(f"press at {t} while a press is active")
            pt = t
            px = gx
            py = gy
            hold = False
            if pend is not None:
                # in-window press: the candidate waits on its classification
                pend = (pend[0], pend[1], pend[2], pend[3], True)
        else:
            if pt < 0:
                raise ProtocolViolation(f"release at {t} without a press")
            if hold:
                out.append(PointerAction(HOLD_END, gx, gy, t))
            elif pend is not None:
                # second short press inside the window: one double click
                out.append(PointerAction(DOUBLE_CLICK, gx, gy, t))
                pend = None
            else:
                pend = (t, gx, gy, t + window_ms, False)
            pt = -1
            hold = False
    else:
        if event.valid:
            gx = event.x
            gy = event.y
            hg = True

    return (gx, gy, hg, pt, px, py, hold, pend, sched), out


def arbiter_finish(state: ArbiterState) -> tuple[ArbiterState, list[PointerAction]]:
    """Flush committed clicks and a trailing open candidate at their expiries.

    An unreleased press is left in place: its classification needs a release.
    """
    gx, gy, hg, pt, px, py, hold, pend, sched = state
    out = [PointerAction(CLICK, cx, cy, ct) for ct, cx, cy in sched]
    if pend is not None and not pend[4]:
        out.append(PointerAction(CLICK, pend[1], pend[2], pend[3]))
        pend = None
    if out:
        return (gx, gy, hg, pt, px, py, hold, pend, ()), out
    return state, []


class Arbiter:
    """Stateful wrapper around the functional core, one instance per session."""

    def __init__(self, config: ArbiterConfig | None = None):
        self.config = config or ArbiterConfig()
        self.state: ArbiterState = initial_state()

    def step(self, event: GazeSample | TriggerEvent) -> list[PointerAction]:
        self.state, actions = arbiter_step(self.state, event, self.config)
        return actions

    def finish(self) -> list[PointerAction]:
        self.state, actions = arbiter_finish(self.state)
        return actions


@dataclass(frozen=True, slots=True)
class TargetRect:
    target_id: str
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError("target rectangles need positive area")

    def contains(self, x: float, y: float) -> bool:
        return self.x <= x <= self.x + self.w and self.y <= y <= self.y + self.h


def resolve_target(x: float, y: float, targets: list[TargetRect]) -> str | None:
    """Topmost (last-listed) target containing the point, boundaries inclusive."""
    for rect in reversed(targets):
        if rect.contains(x, y):
            return rect.target_id
    return None
