"""Brute-force reference oracles the implementation is checked against.

These are deliberately written as plain, direct transcriptions of the
contracts, favoring obviousness over speed, and they share no code with the
package modules they verify.
"""

from __future__ import annotations

from gazekit.arbiter import (
    CLICK,
    DOUBLE_CLICK,
    HOLD_END,
    HOLD_START,
    PointerAction,
    TriggerEvent,
)
from gazekit.core import Fixation, GazeSample


# --------------------------------------------------------------------------
# fixation detection: brute-force sliding-window enumeration
# --------------------------------------------------------------------------

def oracle_fixations(samples, dispersion_px, min_duration_ms):
    """Enumerate windows directly: from each start, recompute the bounding
    box of every candidate window from scratch and keep the longest one
    within the dispersion budget; emit it when it meets the duration."""
    segments = []
    seg = []
    for s in samples:
        if s.valid:
            seg.append(s)
        else:
            if seg:
                segments.append(seg)
            seg = []
    if seg:
        segments.append(seg)

    out = []
    for seg in segments:
        n = len(seg)
        i = 0
        while i < n:
            j = i
            while j + 1 < n:
                window = seg[i : j + 2]
                xs = [s.x for s in window]
                ys = [s.y for s in window]
                if (max(xs) - min(xs)) + (max(ys) - min(ys)) > dispersion_px:
                    break
                j += 1
            if seg[j].t_ms - seg[i].t_ms >= min_duration_ms:
                window = seg[i : j + 1]
                out.append(
                    Fixation(
                        cx=sum(s.x for s in window) / len(window),
                        cy=sum(s.y for s in window) / len(window),
                        start_ms=seg[i].t_ms,
                        end_ms=seg[j].t_ms,
                        sample_count=len(window),
                    )
                )
                i = j + 1
            else:
                i += 1
    return out


# --------------------------------------------------------------------------
# arbiter: whole-trace simulator
# --------------------------------------------------------------------------

def oracle_arbiter(events, hold_ms, window_ms):
    """Classify the full event trace in one pass over press/release pairs.

    Independent of the incremental state machine: pairs are extracted first,
    classified by duration, chained into double clicks by inter-pair gap,
    and the emissions are ordered by (time, owning pair, start-before-end).
    """
    gaze = None
    pairs = []  # (press_t, press_gaze, release_t, release_gaze)
    open_press = None
    for ev in events:
        if isinstance(ev, GazeSample):
            if ev.valid:
                gaze = (ev.x, ev.y)
            continue
        assert isinstance(ev, TriggerEvent)
        if ev.kind == "press":
            assert open_press is None, "oracle input must alternate press/release"
            assert gaze is not None, "oracle input needs gaze before first press"
            open_press = (ev.t_ms, gaze)
        else:
            assert open_press is not None
            pairs.append((open_press[0], open_press[1], ev.t_ms, gaze))
            open_press = None
    assert open_press is None, "oracle input must end with a release"

    emissions = []  # (t, pair_idx, intra, kind, coords)
    pend = None  # (pair_idx, release_t, coords)
    for idx, (p, pg, r, rg) in enumerate(pairs):
        is_hold = (r - p) >= hold_ms
        if pend is not None:
            pj, rj, cj = pend
            if p < rj + window_ms:
                if not is_hold:
                    # two short presses inside the window: one double click
                    emissions.append((r, pj, 0, DOUBLE_CLICK, rg))
                    pend = None
                    continue
                # a hold breaks the chain: the candidate commits as a click,
                # emitted once the hold classification disambiguates it
                t_click = max(rj + window_ms, p + hold_ms)
                emissions.append((t_click, pj, 0, CLICK, cj))
                pend = None
            else:
                emissions.append((rj + window_ms, pj, 0, CLICK, cj))
                pend = None
        if is_hold:
            emissions.append((p + hold_ms, idx, 0, HOLD_START, pg))
            emissions.append((r, idx, 1, HOLD_END, rg))
        else:
            pend = (idx, r, rg)
    if pend is not None:
        pj, rj, cj = pend
        emissions.append((rj + window_ms, pj, 0, CLICK, cj))

    emissions.sort(key=lambda e: (e[0], e[1], e[2]))
    return [PointerAction(kind, xy[0], xy[1], t) for t, _, _, kind, xy in emissions]


# --------------------------------------------------------------------------
# pursuit matching: exhaustive shape x lag distance table, no numpy
# --------------------------------------------------------------------------

def oracle_match_epoch(samples, trajectories, window, lag_grid_ms):
    """Mean distance for every (shape, lag) cell computed longhand; the
    winner is the shape whose best lag gives the smallest mean, ties to the
    lexicographically smallest shape id."""
    import math

    from gazekit.auth import shape_position

    start, end = window
    pts = [(s.t_ms, s.x, s.y) for s in samples if s.valid and start <= s.t_ms < end]
    assert len(pts) >= 10
    table = {}
    for traj in trajectories:
        for lag in lag_grid_ms:
            total = 0.0
            for t, gx, gy in pts:
                sx, sy = shape_position(traj, t - lag)
                total += math.hypot(gx - sx, gy - sy)
            table[(traj.shape_id, lag)] = total / len(pts)
    best_per_shape = {}
    for traj in trajectories:
        best_per_shape[traj.shape_id] = min(table[(traj.shape_id, lag)] for lag in lag_grid_ms)
    winner = min(best_per_shape, key=lambda sid: (best_per_shape[sid], sid))
    return winner, best_per_shape
