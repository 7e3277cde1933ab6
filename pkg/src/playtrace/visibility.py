"""Per-frame visibility analysis.

Turns the trackables of one frame into screen-space candidate boxes: project
the surface polygon, clip it to the screen, carve out anything hidden behind
nearer surfaces, then fit a conservative axis-aligned box into what is left.
A box survives only when it covers at least ``min_visibility`` of the screen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    Point,
    Rect,
    clip_polygon,
    inscribed_rect,
    project_vertex,
    rect_area,
    subtract_occluders,
)
from .trace import FrameRecord, TrackableSnapshot, TrackingState

DEFAULT_MIN_VISIBILITY = 0.10


@dataclass(frozen=True)
class VisibleBox:
    """A usable screen region of one trackable in one frame."""

    trackable_id: str
    frame_index: int
    box: Rect
    visibility_ratio: float
    camera_distance: float


def facing_camera(trackable: TrackableSnapshot, camera_position: np.ndarray) -> bool:
    """True when the surface normal points toward the camera.

    The test is the sign of dot(normal, camera - center); an edge-on surface
    (dot exactly zero) does not count as facing.
    """
    to_camera = np.asarray(camera_position, dtype=float) - trackable.center_world
    return float(np.dot(trackable.normal_world, to_camera)) > 0.0


def screen_clip_polygon(screen_w: float, screen_h: float) -> list[Point]:
    """The screen rectangle as a clip polygon (clockwise in screen coords)."""
    w = float(screen_w)
    h = float(screen_h)
    return [(0.0, h), (w, h), (w, 0.0), (0.0, 0.0)]


def project_trackable(t: TrackableSnapshot, frame: FrameRecord) -> list[Point] | None:
    """Screen-space polygon of a trackable, or None if any vertex is behind the camera."""
    pts: list[Point] = []
    for x, z in t.local_vertices:
        p = project_vertex(
            (x, 0.0, z, 1.0), t.pose, frame.view, frame.projection, frame.screen_w, frame.screen_h
        )
        if p is None:
            return None
        pts.append(p)
    return pts


def analyze_frame(
    frame: FrameRecord,
    min_visibility: float = DEFAULT_MIN_VISIBILITY,
    frame_index: int = 0,
) -> list[VisibleBox]:
    """Visible boxes for every tracked, camera-facing surface in a frame.

    Surfaces that are PAUSED or STOPPED are ignored entirely.  Surfaces that
    face away from the camera produce no box but still occlude: any TRACKING
    projection nearer to the camera (by distance to the surface center) is
    subtracted before the box is fitted.  Results keep the near-to-far
    order in which they were computed.
    """
    w, h = frame.screen_w, frame.screen_h
    clip = screen_clip_polygon(w, h)
    screen_px = float(w) * float(h)
    cam = frame.camera_position

    # near-to-far candidates; ties keep the frame's trackable order
    candidates: list[tuple[float, TrackableSnapshot, list[Point]]] = []
    for t in frame.trackables:
        if t.tracking_state != TrackingState.TRACKING:
            continue
        poly = project_trackable(t, frame)
        if poly is None:
            continue
        dist = float(np.linalg.norm(np.asarray(cam, dtype=float) - t.center_world))
        candidates.append((dist, t, poly))
    candidates.sort(key=lambda c: c[0])

    boxes: list[VisibleBox] = []
    for i, (dist, t, poly) in enumerate(candidates):
        if not facing_camera(t, cam):
            continue
        on_screen = clip_polygon(poly, clip)
        if len(on_screen) < 3:
            continue
        occluders = [p for d, _, p in candidates[:i] if d < dist]
        pieces = subtract_occluders(on_screen, occluders)
        best: Rect | None = None
        for piece in pieces:
            r = inscribed_rect(piece, w, h)
            if r is not None and (best is None or rect_area(r) > rect_area(best)):
                best = r
        if best is None:
            continue
        ratio = rect_area(best) / screen_px
        if ratio >= min_visibility:
            boxes.append(
                VisibleBox(
                    trackable_id=t.trackable_id,
                    frame_index=frame_index,
                    box=best,
                    visibility_ratio=ratio,
                    camera_distance=dist,
                )
            )
    return boxes
