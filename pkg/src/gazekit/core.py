"""Gaze signal core: samples, fixation segmentation, scan-paths, calibration.

Fixation detection is dispersion-threshold identification (I-DT): greedy,
earliest-start windows grown as far as the dispersion budget allows, kept
when they meet the minimum duration.  Dispersion of a window is the
bounding-box measure (max_x - min_x) + (max_y - min_y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_SCREEN_W = 1920
DEFAULT_SCREEN_H = 1080

DEFAULT_DISPERSION_PX = 40.0
DEFAULT_MIN_FIXATION_MS = 100


class NonMonotonicTimestamp(ValueError):
    """Sample timestamp did not strictly increase within its stream."""


class OverlappingFixations(ValueError):
    """Fixation list has time-overlapping entries."""


@dataclass(frozen=True, slots=True)
class GazeSample:
    """One timestamped gaze point. Invalid samples flag tracking loss."""

    t_ms: int
    x: float
    y: float
    valid: bool = True

    def __post_init__(self):
        # keep field types uniform no matter how callers construct samples,
        # so serialized streams never mix int and float coordinates
        object.__setattr__(self, "t_ms", int(self.t_ms))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True, slots=True)
class Fixation:
    cx: float
    cy: float
    start_ms: int
    end_ms: int
    sample_count: int

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True, slots=True)
class ScanPath:
    """Time-ordered fixations; saccade length is the centroid chain length."""

    fixations: tuple[Fixation, ...]
    total_saccade_length: float


@dataclass(frozen=True, slots=True)
class CalibrationDisturbance:
    """Constant pixel offset plus optional uniform scale about screen center."""

    dx: float = 0.0
    dy: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("disturbance scale must be positive")

    @property
    def is_identity(self) -> bool:
        return self.dx == 0.0 and self.dy == 0.0 and self.scale == 1.0


@dataclass
class GazeStream:
    """Single-owner accumulating sample buffer with monotonicity enforcement."""

    samples: list[GazeSample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def last(self) -> GazeSample | None:
        return self.samples[-1] if self.samples else None


def ingest_sample(stream: GazeStream, sample: GazeSample) -> GazeStream:
    """Append sample; reject (state unchanged) unless t_ms strictly advances."""
    if stream.samples and sample.t_ms <= stream.samples[-1].t_ms:
        raise NonMonotonicTimestamp(
            f"t_ms {sample.t_ms} does not advance past {stream.samples[-1].t_ms}"
        )
    stream.samples.append(sample)
    return stream


def _valid_runs(samples: list[GazeSample]) -> list[list[GazeSample]]:
    """Split on invalid samples: tracking loss terminates any open window."""
    runs: list[list[GazeSample]] = []
    cur: list[GazeSample] = []
    for s in samples:
        if s.valid:
            cur.append(s)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def detect_fixations(
    samples: list[GazeSample],
    dispersion_px: float = DEFAULT_DISPERSION_PX,
    min_duration_ms: int = DEFAULT_MIN_FIXATION_MS,
) -> list[Fixation]:
    """I-DT segmentation of a time-ordered sample list.

    From each candidate start, the window is extended sample by sample while
    its bounding-box dispersion stays within budget (running min/max).  A
    window that reaches the minimum duration is emitted and scanning resumes
    after it; otherwise the start advances by one.
    """
    if dispersion_px <= 0:
        raise ValueError("dispersion_px must be positive")
    if min_duration_ms <= 0:
        raise ValueError("min_duration_ms must be positive")

    out: list[Fixation] = []
    for run in _valid_runs(samples):
        n = len(run)
        i = 0
        while i < n:
            min_x = max_x = run[i].x
            min_y = max_y = run[i].y
            j = i
            while j + 1 < n:
                nxt = run[j + 1]
                lo_x = nxt.x if nxt.x < min_x else min_x
                hi_x = nxt.x if nxt.x > max_x else max_x
                lo_y = nxt.y if nxt.y < min_y else min_y
                hi_y = nxt.y if nxt.y > max_y else max_y
                if (hi_x - lo_x) + (hi_y - lo_y) > dispersion_px:
                    break
                min_x, max_x, min_y, max_y = lo_x, hi_x, lo_y, hi_y
                j += 1
            if run[j].t_ms - run[i].t_ms >= min_duration_ms:
                window = run[i : j + 1]
                count = len(window)
                out.append(
                    Fixation(
                        cx=sum(s.x for s in window) / count,
                        cy=sum(s.y for s in window) / count,
                        start_ms=run[i].t_ms,
                        end_ms=run[j].t_ms,
                        sample_count=count,
                    )
                )
                i = j + 1
            else:
                i += 1
    return out


def build_scanpath(fixations: list[Fixation]) -> ScanPath:
    """Wrap fixations, summing centroid-to-centroid saccade distances."""
    for a, b in zip(fixations, fixations[1:]):
        if a.end_ms > b.start_ms:
            raise OverlappingFixations(
                f"fixation ending {a.end_ms} overlaps next starting {b.start_ms}"
            )
    total = 0.0
    for a, b in zip(fixations, fixations[1:]):
        total += math.hypot(b.cx - a.cx, b.cy - a.cy)
    return ScanPath(fixations=tuple(fixations), total_saccade_length=total)


def apply_disturbance(
    samples: list[GazeSample],
    d: CalibrationDisturbance,
    screen_w: int = DEFAULT_SCREEN_W,
    screen_h: int = DEFAULT_SCREEN_H,
) -> list[GazeSample]:
    """Map each valid sample through scale-about-center then offset."""
    if d.is_identity:
        return list(samples)
    cx = screen_w / 2.0
    cy = screen_h / 2.0
    offset_only = d.scale == 1.0
    out = []
    for s in samples:
        if not s.valid:
            out.append(s)
            continue
        if offset_only:
            nx = s.x + d.dx
            ny = s.y + d.dy
        else:
            nx = (s.x - cx) * d.scale + cx + d.dx
            ny = (s.y - cy) * d.scale + cy + d.dy
        out.append(GazeSample(t_ms=s.t_ms, x=nx, y=ny, valid=True))
    return out
