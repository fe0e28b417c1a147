"""gazekit: a hardware-agnostic gaze interaction engine.

Gaze points, a binary trigger commits: point-and-click arbitration,
dwell-free typing, template-matched gaze gestures, and moving-shape
pursuit authentication, all drivable from synthetic or replayed gaze
streams in place of tracker hardware.
"""

__version__ = "0.1.0"
