"""Synthetic gaze sources standing in for eye-tracker hardware.

Followers pursue shape trajectories, tracers draw gesture templates, and
typists work the virtual keyboard.  All of them are pure functions of
their inputs plus a SplitMix64 seed, so any stream can be regenerated
bit-for-bit (see rng.py for the generator contract).
"""

from __future__ import annotations

from dataclasses import dataclass

from .arbiter import TriggerEvent
from .auth import AuthConfig, ShapeTrajectory, shape_position
from .core import GazeSample
from .gestures import GesturePath, GestureTemplate, SOURCE_RAW
from .keyboard import BACKSPACE, ENTER, SPACE, KeyboardLayout, key_at
from .rng import SplitMix64, derive_seed


@dataclass(frozen=True, slots=True)
class NoiseModel:
    sigma_px: float = 0.0
    latency_ms: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_px < 0 or self.latency_ms < 0:
            raise ValueError("noise parameters must be non-negative")


def _sample_times(duration_ms: int, rate_hz: float) -> list[int]:
    dt = 1000.0 / rate_hz
    times = []
    i = 0
    while True:
        t = int(round(i * dt))
        if t >= duration_ms:
            return times
        times.append(t)
        i += 1


def synth_follow(
    traj: ShapeTrajectory,
    duration_ms: int,
    rate_hz: float,
    noise: NoiseModel,
    t_offset_ms: int = 0,
) -> list[GazeSample]:
    """Samples of a follower pursuing one shape.

    Position is the shape's own position ``latency_ms`` in the past
    (clamped at t=0) plus per-axis Gaussian jitter.  ``t_offset_ms`` shifts
    the emitted timestamps, letting callers splice epoch windows together.
    """
    if not 30 <= rate_hz <= 300:
        raise ValueError("rate_hz must be within [30, 300]")
    rng = SplitMix64(derive_seed(noise.seed, 0xF0110))
    out = []
    for t in _sample_times(duration_ms, rate_hz):
        shape_t = max(0, t + t_offset_ms - noise.latency_ms)
        x, y = shape_position(traj, shape_t)
        if noise.sigma_px > 0:
            x += rng.gauss(noise.sigma_px)
            y += rng.gauss(noise.sigma_px)
        out.append(GazeSample(t_ms=t + t_offset_ms, x=x, y=y, valid=True))
    return out


def synth_session_follower(
    trajectories: list[ShapeTrajectory],
    password: list[str],
    config: AuthConfig,
    rate_hz: float,
    noise: NoiseModel,
) -> list[GazeSample]:
    """Full-session stream pursuing the password shapes epoch by epoch.

    Between epochs the follower already tracks the next target (those
    samples fall outside every scoring window).
    """
    by_id = {t.shape_id: t for t in trajectories}
    for sid in password:
        if sid not in by_id:
            raise ValueError(f"password names unknown shape {sid}")
    pitch = config.epoch_ms + config.inter_epoch_ms
    out: list[GazeSample] = []
    for i, sid in enumerate(password):
        start = i * pitch
        span = config.epoch_ms if i == len(password) - 1 else pitch
        epoch_noise = NoiseModel(
            sigma_px=noise.sigma_px,
            latency_ms=noise.latency_ms,
            seed=derive_seed(noise.seed, 0xE90C + i),
        )
        out.extend(synth_follow(by_id[sid], span, rate_hz, epoch_noise, t_offset_ms=start))
    return out


def synth_gesture(
    template: GestureTemplate,
    scale_px: float,
    origin: tuple[float, float],
    noise: NoiseModel,
) -> GesturePath:
    """Template traced on screen at the given scale with Gaussian jitter.

    Latency does not apply to a traced path; only sigma is used.
    """
    if scale_px <= 0:
        raise ValueError("scale_px must be positive")
    rng = SplitMix64(derive_seed(noise.seed, 0x6E57))
    ox, oy = origin
    pts = []
    for x, y in template.points:
        px = x * scale_px + ox
        py = y * scale_px + oy
        if noise.sigma_px > 0:
            px += rng.gauss(noise.sigma_px)
            py += rng.gauss(noise.sigma_px)
        pts.append((px, py))
    return GesturePath(points=tuple(pts), source=SOURCE_RAW)


def synth_typist(
    layout: KeyboardLayout,
    phrase: str,
    noise: NoiseModel,
    key_interval_ms: int = 250,
    press_ms: int = 60,
    correct_errors: bool = True,
) -> list[GazeSample | TriggerEvent]:
    """Event stream of a typist aiming at key centers.

    With sigma 0 every press lands on the intended key and the stream types
    the phrase with no misses.  With jitter the typist may hit a neighbor
    or dead space; when ``correct_errors`` is set it watches its own
    transcription and presses backspace until the text is a prefix of the
    phrase again, then continues.  The event count is capped so heavy noise
    still terminates deterministically.
    """
    rng = SplitMix64(derive_seed(noise.seed, 0x7E97))
    events: list[GazeSample | TriggerEvent] = []
    t = 0
    typed = ""

    backspace_key = None
    for k in layout.keys:
        if k.output == BACKSPACE:
            backspace_key = k
            break

    def aim_and_press(key) -> str | None:
        nonlocal t
        gx = key.x + key.w / 2.0
        gy = key.y + key.h / 2.0
        if noise.sigma_px > 0:
            gx += rng.gauss(noise.sigma_px)
            gy += rng.gauss(noise.sigma_px)
        events.append(GazeSample(t_ms=t, x=gx, y=gy, valid=True))
        events.append(TriggerEvent(t_ms=t + 1, kind="press"))
        events.append(TriggerEvent(t_ms=t + 1 + press_ms, kind="release"))
        t += key_interval_ms
        return key_at(layout, gx, gy)

    def outputs(hit: str | None) -> str | None:
        return None if hit is None else layout.get(hit).output

    if not correct_errors:
        # fire-and-forget: one press per phrase character, mistakes kept
        for ch in phrase:
            aim_and_press(layout.key_for_char(ch))
        return events

    presses_cap = 6 * len(phrase) + 20
    presses = 0
    while typed != phrase and presses < presses_cap:
        presses += 1
        if phrase.startswith(typed):
            ch = phrase[len(typed)]
            hit = aim_and_press(layout.key_for_char(ch))
        elif backspace_key is not None:
            hit = aim_and_press(backspace_key)
        else:
            break
        out = outputs(hit)
        if out == BACKSPACE:
            typed = typed[:-1]
        elif out == SPACE:
            typed += " "
        elif out is not None and out != ENTER:
            typed += out
    return events
