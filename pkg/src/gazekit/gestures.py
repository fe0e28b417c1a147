"""Gaze gesture templates: normalization, training, matching, evaluation.

A gesture path (fixation centroids by default, raw samples for dense
strokes) is normalized into a canonical frame: resampled to a fixed point
count, centroid moved to the origin, and uniformly scaled so the longer
bounding-box side is exactly 1.  No rotation normalization is applied;
gaze gestures are direction-semantic, so a stroke and its reverse must
stay distinct.

Resampling places the points at equal straight-line (chord) steps along
the path, with the step length found by bisection.  Equal chords make the
canonical form an exact fixed point of ``normalize``: resampling a path
whose consecutive points are already equidistant reproduces those points,
so normalizing twice is the same as normalizing once to within float
rounding, and a template self-matches its defining path at ~1e-16.

Matching is nearest-template by mean pointwise Euclidean distance in the
canonical frame, with scores mapped through the half-diagonal of the unit
square (the largest distance two canonical paths can plausibly sit apart).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

HALF_DIAGONAL = math.sqrt(2.0) / 2.0

DEFAULT_RESAMPLE_N = 64
DEFAULT_REJECT_THRESHOLD = 0.75

SOURCE_FIXATIONS = "fixation-centroids"
SOURCE_RAW = "raw-samples"

Point = tuple[float, float]


class DegeneratePath(ValueError):
    """Path has no spatial extent (all points identical)."""


class DuplicateName(ValueError):
    """Template name already present in the store."""


class UnknownLabel(KeyError):
    """Labeled trial names a template the store does not contain."""


@dataclass(frozen=True, slots=True)
class GesturePath:
    points: tuple[Point, ...]
    source: str = SOURCE_RAW

    @staticmethod
    def of(points, source: str = SOURCE_RAW) -> "GesturePath":
        return GesturePath(tuple((float(x), float(y)) for x, y in points), source)


@dataclass(frozen=True, slots=True)
class GestureTemplate:
    name: str
    action_id: str
    points: tuple[Point, ...]  # canonical frame, exactly the store's n points


@dataclass(frozen=True, slots=True)
class RecognitionResult:
    template_name: str
    action_id: str
    score: float
    distance: float


def _arc_length(pts: list[Point]) -> float:
    total = 0.0
    for (ax, ay), (bx, by) in zip(pts, pts[1:]):
        total += math.hypot(bx - ax, by - ay)
    return total


def _march(pts: list[Point], step: float, count: int):
    """Walk the polyline taking ``count`` chords of length ``step``.

    Returns (points, completed, leftover_arc): ``completed`` is False when
    some chord finds no forward intersection inside the remaining path.
    """
    out = [pts[0]]
    seg = 0  # current segment index
    qx, qy = pts[0]
    frac = 0.0  # parametric position of q on segment seg
    step_sq = step * step
    nseg = len(pts) - 1
    for _ in range(count):
        found = False
        j = seg
        lo = frac
        while j < nseg:
            ax, ay = pts[j]
            bx, by = pts[j + 1]
            dx = bx - ax
            dy = by - ay
            fx = ax - qx
            fy = ay - qy
            a = dx * dx + dy * dy
            if a > 0.0:
                b = fx * dx + fy * dy
                c = fx * fx + fy * fy - step_sq
                disc = b * b - a * c
                if disc >= 0.0:
                    root = math.sqrt(disc)
                    # earliest crossing of the circle |p - q| = step at or
                    # past the current position on this segment
                    t1 = (-b - root) / a
                    t2 = (-b + root) / a
                    t = None
                    if lo <= t1 <= 1.0:
                        t = t1
                    elif lo <= t2 <= 1.0:
                        t = t2
                    if t is not None:
                        qx = ax + t * dx
                        qy = ay + t * dy
                        seg = j
                        frac = t
                        out.append((qx, qy))
                        found = True
                        break
            j += 1
            lo = 0.0
        if not found:
            return out, False, 0.0
    # arc length left between the last landed point and the path end
    leftover = math.hypot(pts[seg + 1][0] - qx, pts[seg + 1][1] - qy)
    leftover += _arc_length(pts[seg + 1 :])
    return out, True, leftover


def _resample_equal_chord(pts: list[Point], n: int) -> list[Point]:
    """n points tracing the path with equal consecutive Euclidean spacing.

    The chord length is bisected until marching n-1 chords lands on the
    path end; the end point is then pinned exactly.
    """
    total = _arc_length(pts)
    steps = n - 1
    lo = 0.0
    hi = total / steps  # chords can never be longer than this per step
    out_lo, ok, left = _march(pts, hi, steps)
    if ok and left <= 1e-12 * max(total, 1.0):
        best = out_lo
    else:
        best = None
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            out, ok, left = _march(pts, mid, steps)
            if ok:
                lo = mid
                best = out
                if left <= 1e-13 * max(total, 1.0):
                    break
            else:
                hi = mid
        if best is None:
            raise DegeneratePath("path cannot be resampled into distinct chords")
    best[-1] = pts[-1]
    return best


def _canonicalize(points: list[Point]) -> list[Point]:
    """Translate centroid to origin, scale longer bounding-box side to 1."""
    n = len(points)
    cx = sum(p[0] for p in points) / n
    cy = sum(p[1] for p in points) / n
    shifted = [(x - cx, y - cy) for x, y in points]
    w = max(p[0] for p in shifted) - min(p[0] for p in shifted)
    h = max(p[1] for p in shifted) - min(p[1] for p in shifted)
    side = max(w, h)
    if side <= 0.0:
        raise DegeneratePath("path has no spatial extent")
    inv = 1.0 / side
    return [(x * inv, y * inv) for x, y in shifted]


def normalize(path: GesturePath | list[Point], n: int = DEFAULT_RESAMPLE_N) -> list[Point]:
    """Resample to n equal-chord points and map into the canonical frame."""
    pts = list(path.points) if isinstance(path, GesturePath) else [
        (float(x), float(y)) for x, y in path
    ]
    if n < 2:
        raise ValueError("resample count must be at least 2")
    distinct = any(p != pts[0] for p in pts)
    if len(pts) < 2 or not distinct:
        raise DegeneratePath("need at least two distinct points")
    return _canonicalize(_resample_equal_chord(pts, n))


def path_distance(a: list[Point], b: list[Point]) -> float:
    """Mean pointwise Euclidean distance between two canonical paths."""
    if len(a) != len(b):
        raise ValueError("paths must have equal point counts")
    return sum(math.hypot(p[0] - q[0], p[1] - q[1]) for p, q in zip(a, b)) / len(a)


def score_from_distance(distance: float) -> float:
    return min(1.0, max(0.0, 1.0 - distance / HALF_DIAGONAL))


@dataclass
class TemplateStore:
    """Ordered gesture templates plus the matching configuration.

    Training order is preserved; recognition ties break toward the
    earliest-trained template.
    """

    n: int = DEFAULT_RESAMPLE_N
    reject_threshold: float = DEFAULT_REJECT_THRESHOLD
    templates: list[GestureTemplate] = field(default_factory=list)

    def names(self) -> list[str]:
        return [t.name for t in self.templates]

    def get(self, name: str) -> GestureTemplate:
        for t in self.templates:
            if t.name == name:
                return t
        raise UnknownLabel(name)

    def snapshot(self) -> "TemplateStore":
        """Immutable-enough copy handed to concurrent recognizers."""
        return TemplateStore(self.n, self.reject_threshold, list(self.templates))


def train_template(
    store: TemplateStore,
    name: str,
    sample_paths: list[GesturePath],
    action_id: str,
) -> GestureTemplate:
    """Average the normalized samples pointwise and re-canonicalize.

    Re-normalization after the mean is translate+rescale only: the mean of
    already-resampled paths keeps the point count, and skipping a second
    resample keeps one-sample training exactly equal to plain normalization.
    """
    if not sample_paths:
        raise ValueError("training needs at least one sample path")
    if any(ch.isspace() for ch in name) or not name:
        raise ValueError("template names must be non-empty and contain no whitespace")
    if any(ch.isspace() for ch in action_id) or not action_id:
        raise ValueError("action ids must be non-empty and contain no whitespace")
    if name in store.names():
        raise DuplicateName(name)
    normals = [normalize(p, store.n) for p in sample_paths]
    count = len(normals)
    mean = [
        (
            sum(path[i][0] for path in normals) / count,
            sum(path[i][1] for path in normals) / count,
        )
        for i in range(store.n)
    ]
    template = GestureTemplate(name=name, action_id=action_id, points=tuple(_canonicalize(mean)))
    store.templates.append(template)
    return template


def recognize(
    store: TemplateStore,
    path: GesturePath | list[Point],
    reject_threshold: float | None = None,
) -> RecognitionResult | None:
    """Nearest template by canonical distance; None when nothing qualifies."""
    if not store.templates:
        return None
    threshold = store.reject_threshold if reject_threshold is None else reject_threshold
    probe = normalize(path, store.n)
    best: GestureTemplate | None = None
    best_d = math.inf
    for t in store.templates:
        d = path_distance(probe, list(t.points))
        if d < best_d:  # strict: ties keep the earliest-trained template
            best_d = d
            best = t
    score = score_from_distance(best_d)
    if score < threshold:
        return None
    return RecognitionResult(
        template_name=best.name, action_id=best.action_id, score=score, distance=best_d
    )


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    macro_f1: float
    confusion: dict  # confusion[true_name][predicted_name_or_None] -> count


def evaluate(
    store: TemplateStore,
    labeled_set: list[tuple[GesturePath, str]],
    reject_threshold: float | None = None,
) -> EvaluationReport:
    """Accuracy and macro-F1 over labeled trials; no-match counts as wrong."""
    if not labeled_set:
        raise ValueError("labeled set must be non-empty")
    known = set(store.names())
    confusion: dict = {}
    correct = 0
    for path, true_name in labeled_set:
        if true_name not in known:
            raise UnknownLabel(true_name)
        result = recognize(store, path, reject_threshold)
        predicted = result.template_name if result is not None else None
        confusion.setdefault(true_name, {})
        confusion[true_name][predicted] = confusion[true_name].get(predicted, 0) + 1
        if predicted == true_name:
            correct += 1

    f1s = []
    for name in store.names():
        tp = confusion.get(name, {}).get(name, 0)
        fn = sum(v for k, v in confusion.get(name, {}).items() if k != name)
        fp = sum(
            v
            for true, preds in confusion.items()
            if true != name
            for k, v in preds.items()
            if k == name
        )
        if tp + fn == 0 and tp + fp == 0:
            continue  # class never appeared and was never predicted
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        f1s.append(f1)
    macro = sum(f1s) / len(f1s) if f1s else 0.0
    return EvaluationReport(accuracy=correct / len(labeled_set), macro_f1=macro, confusion=confusion)


# ---------------------------------------------------------------------------
# store file format: header "gtpl 1 <n> <reject_threshold>", then one line
# per template: "name action_id x1 y1 ... xn yn".  Floats are written with
# repr so a round trip is value-exact.
# ---------------------------------------------------------------------------

def dump_store(store: TemplateStore) -> str:
    lines = [f"gtpl 1 {store.n} {store.reject_threshold!r}"]
    for t in store.templates:
        coords = " ".join(f"{x!r} {y!r}" for x, y in t.points)
        lines.append(f"{t.name} {t.action_id} {coords}")
    return "\n".join(lines) + "\n"


def parse_store(text: str) -> TemplateStore:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty template store file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "gtpl" or header[1] != "1":
        raise ValueError("bad template store header (want 'gtpl 1 <n> <threshold>')")
    n = int(header[2])
    threshold = float(header[3])
    store = TemplateStore(n=n, reject_threshold=threshold)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2 + 2 * n:
            raise ValueError(f"line {lineno}: expected {2 + 2 * n} fields, got {len(fields)}")
        name, action_id = fields[0], fields[1]
        if name in store.names():
            raise DuplicateName(f"line {lineno}: {name}")
        coords = [float(v) for v in fields[2:]]
        pts = tuple((coords[2 * i], coords[2 * i + 1]) for i in range(n))
        store.templates.append(GestureTemplate(name=name, action_id=action_id, points=pts))
    return store


def save_store(store: TemplateStore, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_store(store))


def load_store(path: str) -> TemplateStore:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_store(fh.read())
