"""Moving-shape pursuit authentication.

A session shows several shapes moving along seeded closed-form paths.  The
password is the ordered sequence of shapes the user pursues, one per timed
epoch.  Each epoch is scored by comparing the gaze samples inside the epoch
window against every shape's path: the distance to a shape is the mean
Euclidean gap between gaze and shape position, minimized over a small grid
of time lags (absorbing smooth-pursuit latency), and the epoch matches the
shape with the smallest distance.  The session accepts only if every epoch
matched the password entry for that position.

Trajectory generation is seed-deterministic (SplitMix64) and enforces a
minimum pairwise separation between shapes at every instant on a 20 ms
grid, resampling a shape's parameters when it crowds the ones already
placed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_SCREEN_H, DEFAULT_SCREEN_W, GazeSample
from .rng import SplitMix64, derive_seed

CIRCLE_ORBIT = "circle-orbit"
LINEAR_BOUNCE = "linear-bounce"
LISSAJOUS = "lissajous"
TRAJECTORY_KINDS = (CIRCLE_ORBIT, LINEAR_BOUNCE, LISSAJOUS)

_LISSAJOUS_RATIOS = ((1, 2), (2, 3), (3, 2), (2, 1))

MIN_SEPARATION_PX = 80.0
SEPARATION_GRID_MS = 20
MAX_PLACEMENT_ATTEMPTS = 1000

ACCEPT = "Accept"
REJECT = "Reject"
ABORT = "Abort"


class SeparationUnsatisfiable(RuntimeError):
    """Could not place shapes with the required pairwise separation."""


class InsufficientGaze(RuntimeError):
    """Epoch window held fewer valid samples than matching needs."""


@dataclass(frozen=True, slots=True)
class ShapeTrajectory:
    shape_id: str
    kind: str
    cx: float
    cy: float
    amp_x: float
    amp_y: float
    omega: float  # rad/s
    phase: float  # rad
    ratio_x: int = 1  # lissajous frequency multipliers
    ratio_y: int = 1


def shape_position(traj: ShapeTrajectory, t_ms: float) -> tuple[float, float]:
    """Closed-form position at t_ms (defined and continuous for all t >= 0)."""
    t = t_ms / 1000.0
    if traj.kind == CIRCLE_ORBIT:
        theta = traj.omega * t + traj.phase
        return traj.cx + traj.amp_x * math.cos(theta), traj.cy + traj.amp_y * math.sin(theta)
    if traj.kind == LINEAR_BOUNCE:
        # triangle wave in [-1, 1]: the shape shuttles along a fixed axis,
        # crossing the midpoint whenever omega*t + phase hits a multiple of pi
        u = (2.0 / math.pi) * math.asin(math.sin(traj.omega * t + traj.phase))
        return traj.cx + traj.amp_x * u, traj.cy + traj.amp_y * u
    if traj.kind == LISSAJOUS:
        return (
            traj.cx + traj.amp_x * math.sin(traj.ratio_x * traj.omega * t + traj.phase),
            traj.cy + traj.amp_y * math.sin(traj.ratio_y * traj.omega * t),
        )
    raise ValueError(f"unknown trajectory kind {traj.kind}")


def shape_positions(traj: ShapeTrajectory, t_ms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized shape_position over an array of times."""
    t = np.asarray(t_ms, dtype=np.float64) / 1000.0
    if traj.kind == CIRCLE_ORBIT:
        theta = traj.omega * t + traj.phase
        return traj.cx + traj.amp_x * np.cos(theta), traj.cy + traj.amp_y * np.sin(theta)
    if traj.kind == LINEAR_BOUNCE:
        u = (2.0 / np.pi) * np.arcsin(np.sin(traj.omega * t + traj.phase))
        return traj.cx + traj.amp_x * u, traj.cy + traj.amp_y * u
    if traj.kind == LISSAJOUS:
        return (
            traj.cx + traj.amp_x * np.sin(traj.ratio_x * traj.omega * t + traj.phase),
            traj.cy + traj.amp_y * np.sin(traj.ratio_y * traj.omega * t),
        )
    raise ValueError(f"unknown trajectory kind {traj.kind}")


@dataclass(frozen=True, slots=True)
class AuthConfig:
    shape_count: int = 6
    epoch_ms: int = 1500
    inter_epoch_ms: int = 250
    password_length: int = 4
    lag_min_ms: int = 0
    lag_max_ms: int = 300
    lag_step_ms: int = 50
    accept_margin: float = 1.0
    screen_w: int = DEFAULT_SCREEN_W
    screen_h: int = DEFAULT_SCREEN_H

    def __post_init__(self):
        if self.shape_count < 2:
            raise ValueError("need at least two shapes")
        if self.epoch_ms <= 0 or self.inter_epoch_ms < 0 or self.password_length < 1:
            raise ValueError("bad epoch configuration")
        if self.lag_step_ms <= 0 or self.lag_max_ms < self.lag_min_ms:
            raise ValueError("bad lag grid")
        if self.accept_margin < 1.0:
            raise ValueError("accept_margin must be >= 1")

    @property
    def nominal_duration_ms(self) -> int:
        k = self.password_length
        return self.epoch_ms * k + self.inter_epoch_ms * (k - 1)

    @property
    def lag_grid_ms(self) -> list[int]:
        return list(range(self.lag_min_ms, self.lag_max_ms + 1, self.lag_step_ms))

    def epoch_window(self, index: int) -> tuple[int, int]:
        start = index * (self.epoch_ms + self.inter_epoch_ms)
        return start, start + self.epoch_ms


def _grid_layout(count: int, w: int, h: int) -> list[tuple[float, float, float, float]]:
    """Cells (x, y, cw, ch) tiling the screen, one per shape."""
    cols = max(1, round(math.sqrt(count * w / h)))
    rows = math.ceil(count / cols)
    while cols * rows < count:
        cols += 1
    cw = w / cols
    ch = h / rows
    cells = []
    for i in range(count):
        r, c = divmod(i, cols)
        cells.append((c * cw, r * ch, cw, ch))
    return cells


def gen_trajectories(config: AuthConfig, seed: int) -> list[ShapeTrajectory]:
    """Seed-derived trajectories with enforced pairwise separation.

    Shapes are anchored to shuffled grid cells (which keeps them on screen
    and mostly apart); the hard >= 80 px guarantee comes from sweeping a
    20 ms grid over the session and redrawing a shape's parameters when it
    crowds an already-placed one.
    """
    rng = SplitMix64(derive_seed(seed, 0x7261))
    cells = rng.shuffled(_grid_layout(config.shape_count, config.screen_w, config.screen_h))
    t_grid = np.arange(0, config.nominal_duration_ms + 1, SEPARATION_GRID_MS, dtype=np.float64)

    placed: list[ShapeTrajectory] = []
    placed_xy: list[tuple[np.ndarray, np.ndarray]] = []
    for i in range(config.shape_count):
        x0, y0, cw, ch = cells[i]
        jitter = min(cw, ch) / 10.0
        amp_hi = min(cw, ch) / 2.0 - jitter - 45.0
        amp_lo = min(40.0, amp_hi)
        for attempt in range(MAX_PLACEMENT_ATTEMPTS):
            kind = rng.choice(TRAJECTORY_KINDS)
            cx = x0 + cw / 2.0 + rng.uniform_in(-jitter, jitter)
            cy = y0 + ch / 2.0 + rng.uniform_in(-jitter, jitter)
            amp = rng.uniform_in(amp_lo, max(amp_lo, amp_hi))
            omega = rng.uniform_in(0.8, 2.2)
            phase = rng.uniform_in(0.0, 2.0 * math.pi)
            if kind == CIRCLE_ORBIT:
                traj = ShapeTrajectory(f"s{i}", kind, cx, cy, amp, amp, omega, phase)
            elif kind == LINEAR_BOUNCE:
                axis = rng.uniform_in(0.0, math.pi)
                traj = ShapeTrajectory(
                    f"s{i}", kind, cx, cy,
                    amp * math.cos(axis), amp * math.sin(axis), omega, phase,
                )
            else:
                rx, ry = rng.choice(_LISSAJOUS_RATIOS)
                traj = ShapeTrajectory(f"s{i}", kind, cx, cy, amp, amp, omega, phase, rx, ry)
            xs, ys = shape_positions(traj, t_grid)
            ok = True
            for oxs, oys in placed_xy:
                gap = np.hypot(xs - oxs, ys - oys)
                if float(gap.min()) < MIN_SEPARATION_PX:
                    ok = False
                    break
            if ok:
                placed.append(traj)
                placed_xy.append((xs, ys))
                break
        else:
            raise SeparationUnsatisfiable(
                f"shape {i}: no separated placement in {MAX_PLACEMENT_ATTEMPTS} attempts"
            )
    return placed


@dataclass(frozen=True)
class EpochMatch:
    winner: str
    distances: dict[str, float]  # per shape, at that shape's best lag
    best_lag_ms: int


def match_epoch(
    samples: list[GazeSample],
    trajectories: list[ShapeTrajectory],
    window: tuple[int, int],
    config: AuthConfig,
) -> EpochMatch:
    """Lag-searched nearest-trajectory match over one epoch window."""
    start, end = window
    pts = [(s.t_ms, s.x, s.y) for s in samples if s.valid and start <= s.t_ms < end]
    if len(pts) < 10:
        raise InsufficientGaze(f"epoch [{start},{end}) has {len(pts)} valid samples")
    t = np.array([p[0] for p in pts], dtype=np.float64)
    gx = np.array([p[1] for p in pts], dtype=np.float64)
    gy = np.array([p[2] for p in pts], dtype=np.float64)

    distances: dict[str, float] = {}
    lags: dict[str, int] = {}
    for traj in trajectories:
        best = math.inf
        best_lag = config.lag_min_ms
        for lag in config.lag_grid_ms:
            sx, sy = shape_positions(traj, t - lag)
            d = float(np.hypot(gx - sx, gy - sy).mean())
            if d < best:
                best = d
                best_lag = lag
        distances[traj.shape_id] = best
        lags[traj.shape_id] = best_lag

    winner = min(distances, key=lambda sid: (distances[sid], sid))
    return EpochMatch(winner=winner, distances=distances, best_lag_ms=lags[winner])


@dataclass(frozen=True)
class EpochResult:
    index: int
    winner: str
    distances: dict[str, float]
    matched: bool


@dataclass(frozen=True)
class AuthSession:
    trajectories: list[ShapeTrajectory]
    password: list[str]
    epochs: list[EpochResult]
    outcome: str  # Accept | Reject | Abort
    wall_ms: int


def evaluate_epoch(
    samples: list[GazeSample],
    trajectories: list[ShapeTrajectory],
    index: int,
    config: AuthConfig,
    expected_id: str,
) -> EpochResult:
    """Match one epoch window and apply the margin/expectation rule."""
    match = match_epoch(samples, trajectories, config.epoch_window(index), config)
    ranked = sorted(match.distances.values())
    confident = (
        len(ranked) < 2
        or ranked[0] == 0.0
        or ranked[1] / ranked[0] >= config.accept_margin
    )
    return EpochResult(
        index=index,
        winner=match.winner,
        distances=match.distances,
        matched=confident and match.winner == expected_id,
    )


def run_auth_session(
    samples: list[GazeSample],
    config: AuthConfig,
    seed: int,
    password: list[str],
) -> AuthSession:
    """Evaluate all epochs of a password attempt against a seeded layout.

    Accept requires every epoch to match its password entry in order; a
    mismatch rejects but later epochs are still evaluated for diagnostics.
    An epoch without enough valid gaze aborts at that epoch's window end.
    """
    if len(password) != config.password_length:
        raise ValueError(
            f"password length {len(password)} != configured {config.password_length}"
        )
    trajectories = gen_trajectories(config, seed)
    ids = {t.shape_id for t in trajectories}
    for sid in password:
        if sid not in ids:
            raise ValueError(f"password names unknown shape {sid}")

    epochs: list[EpochResult] = []
    all_matched = True
    for i in range(config.password_length):
        try:
            result = evaluate_epoch(samples, trajectories, i, config, password[i])
        except InsufficientGaze:
            return AuthSession(
                trajectories=trajectories,
                password=list(password),
                epochs=epochs,
                outcome=ABORT,
                wall_ms=config.epoch_window(i)[1],
            )
        epochs.append(result)
        if not result.matched:
            all_matched = False
    return AuthSession(
        trajectories=trajectories,
        password=list(password),
        epochs=epochs,
        outcome=ACCEPT if all_matched else REJECT,
        wall_ms=config.nominal_duration_ms,
    )


# ---------------------------------------------------------------------------
# transcript file format:
#   auth 1 <seed> <K> <shape_count>
#   epoch <i> winner <id> distances <id:val ...>
#   outcome <Accept|Reject|Abort> <wall_ms>
# ---------------------------------------------------------------------------

def dump_transcript(session: AuthSession, seed: int, config: AuthConfig) -> str:
    lines = [f"auth 1 {seed} {config.password_length} {config.shape_count}"]
    for ep in session.epochs:
        dists = " ".join(f"{sid}:{ep.distances[sid]!r}" for sid in sorted(ep.distances))
        lines.append(f"epoch {ep.index} winner {ep.winner} distances {dists}")
    lines.append(f"outcome {session.outcome} {session.wall_ms}")
    return "\n".join(lines) + "\n"
