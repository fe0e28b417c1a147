"""Bundled assets: the stock gesture set, default keyboard, phrase set,
and reference numbers from the human studies of the original foot-trigger
hardware (kept as documented baselines; nothing in the engine asserts
them, since desk-scale synthetic runs are not a user study).
"""

from __future__ import annotations

import math
from importlib import resources

from .gestures import GesturePath, TemplateStore, train_template
from .keyboard import BACKSPACE, ENTER, SPACE, Key, KeyboardLayout


def data_text(name: str) -> str:
    """Contents of a bundled data file (phrases.txt, qwerty.layout, ...)."""
    return resources.files("gazekit.data").joinpath(name).read_text(encoding="utf-8")


def data_path(name: str) -> str:
    """Filesystem path of a bundled data file, for CLI flags."""
    return str(resources.files("gazekit.data").joinpath(name))

# Mean measurements reported for the original systems, for reports and docs.
TYPING_BASELINE_IMPAIRED = {"wpm": 7.39, "kspc": 1.06, "rba": 0.06}
TYPING_BASELINE_ABLE = {"wpm": 10.48, "kspc": 1.09, "rba": 0.09, "typical_wpm": 6.97}
AUTH_BASELINE_ACCURACY = {"true_calibration": 0.99, "disturbed_calibration": 0.96}
GESTURE_BASELINE = {"accuracy": 0.93, "f_measure": 0.96}
# The deployed predecessor authenticated in ~15 s; this engine's default
# session budget is the sub-7 s target (see AuthConfig.nominal_duration_ms).
AUTH_BASELINE_SESSION_S = 15.0


def _densify(waypoints: list[tuple[float, float]], step_px: float = 6.0) -> list[tuple[float, float]]:
    """Interpolate waypoint chains into a dense polyline, like a real trace."""
    pts: list[tuple[float, float]] = [waypoints[0]]
    for (ax, ay), (bx, by) in zip(waypoints, waypoints[1:]):
        dist = math.hypot(bx - ax, by - ay)
        steps = max(1, int(dist / step_px))
        for i in range(1, steps + 1):
            f = i / steps
            pts.append((ax + f * (bx - ax), ay + f * (by - ay)))
    return pts


# name -> (action id, waypoints in screen pixels).  Direction matters:
# a stroke and its reverse are different gestures.
_GESTURE_SHAPES: dict[str, tuple[str, list[tuple[float, float]]]] = {
    "stroke_down": ("window.minimize", [(960, 340), (960, 740)]),
    "stroke_up": ("window.maximize", [(960, 740), (960, 340)]),
    "stroke_right": ("tab.next", [(760, 540), (1160, 540)]),
    "stroke_left": ("tab.prev", [(1160, 540), (760, 540)]),
    "ell_down_right": ("window.close", [(860, 340), (860, 700), (1160, 700)]),
    "ell_right_down": ("window.restore", [(810, 390), (1110, 390), (1110, 740)]),
    "zigzag": ("page.refresh", [(780, 440), (1140, 440), (780, 640), (1140, 640)]),
    "vee": ("browser.new-tab", [(810, 390), (960, 740), (1110, 390)]),
}


def bundled_gesture_paths() -> dict[str, tuple[str, GesturePath]]:
    """Defining path (and bound action) for every stock gesture."""
    return {
        name: (action, GesturePath.of(_densify(waypoints)))
        for name, (action, waypoints) in _GESTURE_SHAPES.items()
    }


def bundled_template_store(n: int = 64, reject_threshold: float = 0.75) -> TemplateStore:
    """The stock 8-template store, trained from the defining paths."""
    store = TemplateStore(n=n, reject_threshold=reject_threshold)
    for name, (action, path) in bundled_gesture_paths().items():
        train_template(store, name, [path], action)
    return store


_KEY_SIZE = 120.0
_KEY_GAP = 8.0
_ROW_PITCH = _KEY_SIZE + _KEY_GAP


def default_layout() -> KeyboardLayout:
    """QWERTY grid, 120 px keys with 8 px gaps, controls on the bottom row."""
    rows = ["qwertyuiop", "asdfghjkl", "zxcvbnm"]
    keys: list[Key] = []
    top = 380.0
    for r, letters in enumerate(rows):
        width = len(letters) * _KEY_SIZE + (len(letters) - 1) * _KEY_GAP
        x0 = (1920.0 - width) / 2.0
        for i, ch in enumerate(letters):
            keys.append(
                Key(ch, ch, ch, x0 + i * _ROW_PITCH, top + r * _ROW_PITCH, _KEY_SIZE, _KEY_SIZE)
            )
    bottom = top + 3 * _ROW_PITCH
    keys.append(Key("space", "space", SPACE, 516.0, bottom, 392.0, _KEY_SIZE))
    keys.append(Key("backspace", "bksp", BACKSPACE, 916.0, bottom, 240.0, _KEY_SIZE))
    keys.append(Key("enter", "enter", ENTER, 1164.0, bottom, 240.0, _KEY_SIZE))
    return KeyboardLayout(keys=tuple(keys))


BUNDLED_PHRASES = [
    "the quick brown fox jumps over the lazy dog",
    "hello world",
    "time flies when you are having fun",
    "a watched pot never boils",
    "practice makes perfect",
    "the early bird catches the worm",
    "look before you leap",
    "actions speak louder than words",
    "every cloud has a silver lining",
    "all that glitters is not gold",
    "the pen is mightier than the sword",
    "when in rome do as the romans do",
    "a picture is worth a thousand words",
    "better late than never",
    "birds of a feather flock together",
    "do not count your chickens before they hatch",
    "fortune favors the bold",
    "honesty is the best policy",
    "knowledge is power",
    "no news is good news",
    "once in a blue moon",
    "the ball is in your court",
    "two heads are better than one",
    "you can not judge a book by its cover",
]
