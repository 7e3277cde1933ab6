"""Synthetic scene simulator.

A scene is a handful of flat rectangular (or polygonal) surfaces in world
space plus a camera path.  From it the simulator renders a playback trace
(optionally with vertex noise and frame dropout), answers ground-truth hit
tests by casting rays against the surfaces, and executes gesture schedules
to measure how many gestures stay on a single tracked surface from start to
finish.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .scheduler import EventSchedule, GestureEvent, GestureKind
from .trace import (
    FrameRecord,
    PlaybackTrace,
    TrackableSnapshot,
    TrackingState,
)

_HIT_EPS_M = 1e-9         # slack when testing a hit point against surface bounds
_RAY_PARALLEL_EPS = 1e-12
MIN_PATH_SAMPLES = 10     # gesture paths are checked at no fewer points than this


class SceneError(ValueError):
    """The scene description is inconsistent."""


@dataclass(frozen=True)
class ScenePlane:
    """One flat surface: center, unit normal and two unit in-plane axes."""

    plane_id: str
    center: np.ndarray
    normal: np.ndarray
    axis_u: np.ndarray
    axis_v: np.ndarray
    extent_u: float           # half extent along axis_u, meters
    extent_v: float
    detect_delay_ms: int = 0
    lost_intervals: tuple[tuple[int, int], ...] = ()
    local_vertices: tuple[tuple[float, float], ...] | None = None  # None = the full rectangle

    def vertices(self) -> tuple[tuple[float, float], ...]:
        if self.local_vertices is not None:
            return self.local_vertices
        eu, ev = self.extent_u, self.extent_v
        return ((-eu, -ev), (eu, -ev), (eu, ev), (-eu, ev))

    def pose(self) -> np.ndarray:
        """Local (x, y, z) -> world, with y along the normal."""
        m = np.eye(4)
        m[:3, 0] = self.axis_u
        m[:3, 1] = self.normal
        m[:3, 2] = self.axis_v
        m[:3, 3] = self.center
        m.flags.writeable = False
        return m


@dataclass(frozen=True)
class CameraKeyframe:
    t_ms: int
    position: np.ndarray
    look_at: np.ndarray
    up: np.ndarray


@dataclass(frozen=True)
class Jitter:
    """Per-run recording imperfections."""

    vertex_noise_m: float = 0.0
    dropout_prob: float = 0.0


@dataclass(frozen=True)
class SimScene:
    name: str
    screen_w: int
    screen_h: int
    fps: float
    duration_ms: int
    fov_y_deg: float
    near_m: float
    far_m: float
    camera_path: tuple[CameraKeyframe, ...]
    planes: tuple[ScenePlane, ...]
    default_jitter: Jitter = field(default_factory=Jitter)


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > 1e-6:
        raise SceneError(f"{what} must be unit length, |v|={n:.8f}")
    return v


def _vec(values: Sequence[float]) -> np.ndarray:
    v = np.array([float(x) for x in values], dtype=float)
    v.flags.writeable = False
    return v


def validate_scene(scene: SimScene) -> SimScene:
    if scene.screen_w <= 0 or scene.screen_h <= 0:
        raise SceneError("screen dimensions must be positive")
    if scene.fps <= 0 or scene.duration_ms <= 0:
        raise SceneError("fps and duration must be positive")
    if not (0.0 < scene.fov_y_deg < 180.0):
        raise SceneError("fov_y_deg must be in (0, 180)")
    if not (0.0 < scene.near_m < scene.far_m):
        raise SceneError("need 0 < near < far")
    if not scene.camera_path:
        raise SceneError("camera path needs at least one keyframe")
    times = [k.t_ms for k in scene.camera_path]
    if times != sorted(times) or len(set(times)) != len(times):
        raise SceneError("camera keyframes must have strictly increasing times")
    if times[0] < 0 or times[-1] > scene.duration_ms:
        raise SceneError("camera keyframe times must lie within the scene duration")
    seen: set[str] = set()
    for p in scene.planes:
        if p.plane_id in seen:
            raise SceneError(f"duplicate plane id '{p.plane_id}'")
        seen.add(p.plane_id)
        _unit(p.normal, f"plane '{p.plane_id}' normal")
        _unit(p.axis_u, f"plane '{p.plane_id}' axis_u")
        _unit(p.axis_v, f"plane '{p.plane_id}' axis_v")
        for a, b, names in (
            (p.axis_u, p.normal, "axis_u/normal"),
            (p.axis_v, p.normal, "axis_v/normal"),
            (p.axis_u, p.axis_v, "axis_u/axis_v"),
        ):
            if abs(float(np.dot(a, b))) > 1e-6:
                raise SceneError(f"plane '{p.plane_id}': {names} must be orthogonal")
        if p.extent_u <= 0 or p.extent_v <= 0:
            raise SceneError(f"plane '{p.plane_id}': extents must be positive")
        for s, e in p.lost_intervals:
            if not (0 <= s < e):
                raise SceneError(f"plane '{p.plane_id}': bad lost interval [{s}, {e}]")
    return scene


def scene_from_dict(d: dict) -> SimScene:
    try:
        planes = tuple(
            ScenePlane(
                plane_id=str(pd["id"]),
                center=_vec(pd["center"]),
                normal=_vec(pd["normal"]),
                axis_u=_vec(pd["axis_u"]),
                axis_v=_vec(pd["axis_v"]),
                extent_u=float(pd["extents"][0]),
                extent_v=float(pd["extents"][1]),
                detect_delay_ms=int(pd.get("detect_delay_ms", 0)),
                lost_intervals=tuple(
                    (int(s), int(e)) for s, e in pd.get("lost_intervals", [])
                ),
                local_vertices=(
                    tuple((float(x), float(z)) for x, z in pd["verts"])
                    if "verts" in pd
                    else None
                ),
            )
            for pd in d["planes"]
        )
        path = tuple(
            CameraKeyframe(
                t_ms=int(kd["t_ms"]),
                position=_vec(kd["pos"]),
                look_at=_vec(kd["look_at"]),
                up=_vec(kd.get("up", (0.0, 1.0, 0.0))),
            )
            for kd in d["camera_path"]
        )
        jd = d.get("jitter", {})
        scene = SimScene(
            name=str(d.get("name", "")),
            screen_w=int(d["screen"][0]),
            screen_h=int(d["screen"][1]),
            fps=float(d["fps"]),
            duration_ms=int(d["duration_ms"]),
            fov_y_deg=float(d["intrinsics"]["fov_y_deg"]),
            near_m=float(d["intrinsics"]["near_m"]),
            far_m=float(d["intrinsics"]["far_m"]),
            camera_path=path,
            planes=planes,
            default_jitter=Jitter(
                vertex_noise_m=float(jd.get("vertex_noise_m", 0.0)),
                dropout_prob=float(jd.get("dropout_prob", 0.0)),
            ),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, SceneError):
            raise
        raise SceneError(f"malformed scene: {exc}") from None
    return validate_scene(scene)


def scene_to_dict(scene: SimScene) -> dict:
    return {
        "name": scene.name,
        "screen": [scene.screen_w, scene.screen_h],
        "fps": scene.fps,
        "duration_ms": scene.duration_ms,
        "intrinsics": {
            "fov_y_deg": scene.fov_y_deg,
            "near_m": scene.near_m,
            "far_m": scene.far_m,
        },
        "camera_path": [
            {
                "t_ms": k.t_ms,
                "pos": [float(v) for v in k.position],
                "look_at": [float(v) for v in k.look_at],
                "up": [float(v) for v in k.up],
            }
            for k in scene.camera_path
        ],
        "planes": [
            {
                "id": p.plane_id,
                "center": [float(v) for v in p.center],
                "normal": [float(v) for v in p.normal],
                "axis_u": [float(v) for v in p.axis_u],
                "axis_v": [float(v) for v in p.axis_v],
                "extents": [p.extent_u, p.extent_v],
                "detect_delay_ms": p.detect_delay_ms,
                "lost_intervals": [[s, e] for s, e in p.lost_intervals],
                **({"verts": [[x, z] for x, z in p.local_vertices]} if p.local_vertices else {}),
            }
            for p in scene.planes
        ],
        "jitter": {
            "vertex_noise_m": scene.default_jitter.vertex_noise_m,
            "dropout_prob": scene.default_jitter.dropout_prob,
        },
    }


def load_scene(path: str | Path) -> SimScene:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SceneError(f"{Path(path).name}: invalid JSON: {exc.msg}") from None
    return scene_from_dict(d)


def save_scene(scene: SimScene, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(scene_to_dict(scene), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def perspective_matrix(fov_y_deg: float, aspect: float, near: float, far: float) -> np.ndarray:
    """Standard OpenGL-style perspective projection (right-handed, looks down -z)."""
    g = 1.0 / math.tan(math.radians(fov_y_deg) / 2.0)
    m = np.zeros((4, 4))
    m[0, 0] = g / aspect
    m[1, 1] = g
    m[2, 2] = (far + near) / (near - far)
    m[2, 3] = 2.0 * far * near / (near - far)
    m[3, 2] = -1.0
    m.flags.writeable = False
    return m


def look_at_matrix(eye: np.ndarray, target: np.ndarray, up: np.ndarray) -> np.ndarray:
    """World -> camera matrix for a camera at eye looking at target."""
    eye = np.asarray(eye, dtype=float)
    f = np.asarray(target, dtype=float) - eye
    fn = float(np.linalg.norm(f))
    if fn < 1e-12:
        raise SceneError("camera position and look-at target coincide")
    f = f / fn
    s = np.cross(f, np.asarray(up, dtype=float))
    sn = float(np.linalg.norm(s))
    if sn < 1e-12:
        raise SceneError("camera up vector is parallel to the view direction")
    s = s / sn
    u = np.cross(s, f)
    m = np.eye(4)
    m[0, :3] = s
    m[1, :3] = u
    m[2, :3] = -f
    m[0, 3] = -float(np.dot(s, eye))
    m[1, 3] = -float(np.dot(u, eye))
    m[2, 3] = float(np.dot(f, eye))
    m.flags.writeable = False
    return m


def camera_pose_at(scene: SimScene, t_ms: float) -> tuple[np.ndarray, np.ndarray]:
    """Camera position and view matrix at time t (clamped to the keyframe range)."""
    path = scene.camera_path
    if t_ms <= path[0].t_ms or len(path) == 1:
        k = path[0]
        return k.position.copy(), look_at_matrix(k.position, k.look_at, k.up)
    if t_ms >= path[-1].t_ms:
        k = path[-1]
        return k.position.copy(), look_at_matrix(k.position, k.look_at, k.up)
    hi = 1
    while path[hi].t_ms < t_ms:
        hi += 1
    a, b = path[hi - 1], path[hi]
    f = (t_ms - a.t_ms) / (b.t_ms - a.t_ms)
    pos = a.position + (b.position - a.position) * f
    look = a.look_at + (b.look_at - a.look_at) * f
    up = a.up + (b.up - a.up) * f
    return pos, look_at_matrix(pos, look, up)


def plane_detected(plane: ScenePlane, t_ms: float) -> bool:
    """Whether tracking reports the plane at time t (delay and loss, not dropout)."""
    if t_ms < plane.detect_delay_ms:
        return False
    for s, e in plane.lost_intervals:
        if s <= t_ms < e:
            return False
    return True


def frame_times(scene: SimScene) -> list[int]:
    times = []
    k = 0
    while True:
        t = int(round(k * 1000.0 / scene.fps))
        if t >= scene.duration_ms:
            break
        times.append(t)
        k += 1
    return times


def generate_trace(
    scene: SimScene,
    jitter_seed: int = 0,
    jitter: Jitter | None = None,
) -> PlaybackTrace:
    """Render the scene into a playback trace.

    Dropout makes a detected plane vanish from single frames at random;
    vertex noise perturbs the reported polygon corners in the plane's local
    frame.  Both draw from one generator seeded with jitter_seed, so equal
    (scene, seed, jitter) inputs give byte-identical traces.
    """
    validate_scene(scene)
    if jitter is None:
        jitter = scene.default_jitter
    rng = np.random.default_rng(jitter_seed)
    aspect = scene.screen_w / scene.screen_h
    proj = perspective_matrix(scene.fov_y_deg, aspect, scene.near_m, scene.far_m)
    frames: list[FrameRecord] = []
    for t in frame_times(scene):
        eye, view = camera_pose_at(scene, t)
        trackables: list[TrackableSnapshot] = []
        for plane in scene.planes:
            if not plane_detected(plane, t):
                continue
            if jitter.dropout_prob > 0.0 and rng.random() < jitter.dropout_prob:
                continue
            verts = plane.vertices()
            if jitter.vertex_noise_m > 0.0:
                noise = rng.normal(0.0, jitter.vertex_noise_m, size=(len(verts), 2))
                verts = tuple(
                    (x + float(nx), z + float(nz)) for (x, z), (nx, nz) in zip(verts, noise)
                )
            trackables.append(
                TrackableSnapshot(
                    trackable_id=plane.plane_id,
                    pose=plane.pose(),
                    local_vertices=verts,
                    center_world=plane.center,
                    normal_world=plane.normal,
                    tracking_state=TrackingState.TRACKING,
                )
            )
        cam_pos = np.array(eye, dtype=float)
        cam_pos.flags.writeable = False
        frames.append(
            FrameRecord(
                timestamp_ms=t,
                view=view,
                projection=proj,
                camera_position=cam_pos,
                screen_w=scene.screen_w,
                screen_h=scene.screen_h,
                trackables=tuple(trackables),
            )
        )
    meta = {
        "scene": scene_to_dict(scene),
        "jitter": {"vertex_noise_m": jitter.vertex_noise_m, "dropout_prob": jitter.dropout_prob},
        "jitter_seed": jitter_seed,
    }
    return PlaybackTrace(frames=tuple(frames), source_fps=scene.fps, metadata=meta)


def _rays_from_pixels(
    scene: SimScene, t_ms: float, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """World-space origin and unit directions for screen points at time t."""
    eye, view = camera_pose_at(scene, t_ms)
    aspect = scene.screen_w / scene.screen_h
    proj = perspective_matrix(scene.fov_y_deg, aspect, scene.near_m, scene.far_m)
    inv = np.linalg.inv(proj @ view)
    x_ndc = 2.0 * points[:, 0] / scene.screen_w - 1.0
    y_ndc = 1.0 - 2.0 * points[:, 1] / scene.screen_h
    clip = np.stack([x_ndc, y_ndc, np.ones_like(x_ndc), np.ones_like(x_ndc)], axis=1)
    world = clip @ inv.T
    world = world[:, :3] / world[:, 3:4]
    dirs = world - eye
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return eye, dirs


def hit_test_batch(
    scene: SimScene, t_ms: float, points: np.ndarray, ignore_detection: bool = False
) -> list[str | None]:
    """Nearest surface under each screen point at time t, or None for sky.

    Only planes whose tracking reports them at t participate, unless
    ignore_detection is set (useful to tell 'nothing there' apart from
    'there but not yet tracked').
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    eye, dirs = _rays_from_pixels(scene, t_ms, points)
    n_pts = len(points)
    best_t = np.full(n_pts, np.inf)
    best_id: list[str | None] = [None] * n_pts
    for plane in scene.planes:
        if not ignore_detection and not plane_detected(plane, t_ms):
            continue
        denom = dirs @ plane.normal
        with np.errstate(divide="ignore", invalid="ignore"):
            t_ray = float(np.dot(plane.normal, plane.center - eye)) / denom
        valid = (np.abs(denom) > _RAY_PARALLEL_EPS) & (t_ray > _RAY_PARALLEL_EPS)
        if not np.any(valid):
            continue
        pts = eye + dirs * t_ray[:, None]
        rel = pts - plane.center
        a = rel @ plane.axis_u
        b = rel @ plane.axis_v
        if plane.local_vertices is None:
            inside = (np.abs(a) <= plane.extent_u + _HIT_EPS_M) & (
                np.abs(b) <= plane.extent_v + _HIT_EPS_M
            )
        else:
            inside = _points_in_polygon_mask(a, b, plane.local_vertices)
        hit = valid & inside & (t_ray < best_t)
        for i in np.nonzero(hit)[0]:
            best_t[i] = t_ray[i]
            best_id[i] = plane.plane_id
    return best_id


def _points_in_polygon_mask(
    xs: np.ndarray, ys: np.ndarray, poly: Sequence[tuple[float, float]]
) -> np.ndarray:
    inside = np.zeros(len(xs), dtype=bool)
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        crossing = (np.asarray(ay > ys)) != (np.asarray(by > ys))
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = ax + (ys - ay) / (by - ay) * (bx - ax)
        inside ^= crossing & (x_cross > xs)
    return inside


def hit_test(scene: SimScene, t_ms: float, point: tuple[float, float]) -> str | None:
    """Nearest tracked surface under one screen point, or None."""
    return hit_test_batch(scene, t_ms, np.array([point]))[0]


class OutcomeReason(str, Enum):
    HIT = "HIT"
    MISS_NO_PLANE = "MISS_NO_PLANE"
    LEFT_PLANE_MID_GESTURE = "LEFT_PLANE_MID_GESTURE"
    PLANE_NOT_TRACKED = "PLANE_NOT_TRACKED"
    SPLIT_TARGETS = "SPLIT_TARGETS"


@dataclass(frozen=True)
class GestureOutcome:
    event: GestureEvent
    success: bool
    reason: OutcomeReason


def _track_positions(track: Sequence[tuple[int, float, float]], times: np.ndarray) -> np.ndarray:
    ts = np.array([p[0] for p in track], dtype=float)
    xs = np.array([p[1] for p in track], dtype=float)
    ys = np.array([p[2] for p in track], dtype=float)
    return np.stack([np.interp(times, ts, xs), np.interp(times, ts, ys)], axis=1)


def execute_schedule(
    scene: SimScene, schedule: EventSchedule
) -> tuple[list[GestureOutcome], dict[str, float | None]]:
    """Run every gesture against the scene and score it.

    A gesture succeeds only when every sampled point of every finger track
    lands on the same tracked surface for the whole gesture.  The summary
    maps each gesture kind (and "overall") to its success rate, with None
    where the schedule contained no gesture of that kind.
    """
    validate_scene(scene)
    outcomes: list[GestureOutcome] = []
    for ev in schedule.events:
        if ev.t_end_ms > scene.duration_ms:
            raise SceneError(f"gesture at {ev.t_start_ms} ms runs past the scene duration")
        if ev.kind == GestureKind.TAP:
            times = np.array([float(ev.t_start_ms)])
        else:
            n = max(MIN_PATH_SAMPLES, max(len(tr) for tr in ev.tracks))
            times = np.linspace(float(ev.t_start_ms), float(ev.t_end_ms), n)
        track_pts = [_track_positions(tr, times) for tr in ev.tracks]
        seen: set[str | None] = set()
        for k, t in enumerate(times):
            pts = np.array([tp[k] for tp in track_pts])
            seen.update(hit_test_batch(scene, float(t), pts))
        if None not in seen and len(seen) == 1:
            outcomes.append(GestureOutcome(ev, True, OutcomeReason.HIT))
            continue
        hit_ids = {s for s in seen if s is not None}
        if len(hit_ids) >= 2:
            reason = OutcomeReason.SPLIT_TARGETS
        elif len(hit_ids) == 1:
            reason = OutcomeReason.LEFT_PLANE_MID_GESTURE
        else:
            # nothing tracked anywhere: was there geometry at all?
            undetected = False
            for k, t in enumerate(times):
                pts = np.array([tp[k] for tp in track_pts])
                if any(i is not None for i in hit_test_batch(scene, float(t), pts, ignore_detection=True)):
                    undetected = True
                    break
            reason = OutcomeReason.PLANE_NOT_TRACKED if undetected else OutcomeReason.MISS_NO_PLANE
        outcomes.append(GestureOutcome(ev, False, reason))
    summary = gsr_summary(outcomes)
    return outcomes, summary


def gsr_summary(outcomes: Sequence[GestureOutcome]) -> dict[str, float | None]:
    """Gesture success rate per kind plus "overall"; None where nothing was attempted."""
    summary: dict[str, float | None] = {}
    total = 0
    won = 0
    for kind in GestureKind:
        attempts = [o for o in outcomes if o.event.kind == kind]
        total += len(attempts)
        wins = sum(1 for o in attempts if o.success)
        won += wins
        summary[kind.value] = wins / len(attempts) if attempts else None
    summary["overall"] = won / total if total else None
    return summary


def outcomes_to_dict(
    outcomes: Sequence[GestureOutcome], summary: dict[str, float | None]
) -> dict:
    return {
        "gsr": summary,
        "outcomes": [
            {
                "kind": o.event.kind.value,
                "t": [o.event.t_start_ms, o.event.t_end_ms],
                "target": o.event.target_id,
                "success": o.success,
                "reason": o.reason.value,
            }
            for o in outcomes
        ],
    }
