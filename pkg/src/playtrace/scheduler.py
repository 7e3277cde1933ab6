"""Gesture scheduling.

Builds a timed gesture schedule either guided by test opportunities (every
touch lands inside a stable box while its opportunity is active) or blindly
over the whole screen, Monkey-style.  Both generators share one clocked walk:
time advances in fixed steps, and a step not covered by a running gesture
becomes an attempt.  Every attempt draws its gesture kind from a stream seeded
only by (seed), and reserves the gesture's duration whether or not an event is
actually emitted.  Guided runs emit an attempt only when it fits inside an
active test opportunity, so for one seed, mix and throttle the guided schedule
is a subset of the attempts the random baseline fires, and never has more
events.  Touch placement draws from a second stream so it cannot desync the
cadence.  A given (inputs, seed) pair always produces the identical schedule.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .geometry import Rect
from .lifespan import TestOpportunity


class GestureKind(str, Enum):
    TAP = "TAP"
    DRAG = "DRAG"
    PINCH = "PINCH"
    ROTATE = "ROTATE"


# canonical order for cumulative draws; changing it changes schedules
_KIND_ORDER = (GestureKind.TAP, GestureKind.DRAG, GestureKind.PINCH, GestureKind.ROTATE)

DEFAULT_MIX: dict[GestureKind, float] = {
    GestureKind.TAP: 0.55,
    GestureKind.DRAG: 0.25,
    GestureKind.PINCH: 0.10,
    GestureKind.ROTATE: 0.10,
}

DEFAULT_DURATIONS_MS: dict[GestureKind, int] = {
    GestureKind.TAP: 50,
    GestureKind.DRAG: 500,
    GestureKind.PINCH: 700,
    GestureKind.ROTATE: 700,
}

DEFAULT_MIN_GAP_MS = 100
BOX_INSET_FRACTION = 0.05   # touches stay this far (fractionally) inside the box
_TRACK_SAMPLES = 8
# offset separating the placement stream from the kind stream for one seed
_PLACEMENT_STREAM_OFFSET = 0x9E3779B9

TrackPoint = tuple[int, float, float]


@dataclass(frozen=True)
class GestureEvent:
    kind: GestureKind
    t_start_ms: int
    t_end_ms: int
    tracks: tuple[tuple[TrackPoint, ...], ...]
    target_id: str | None = None


@dataclass(frozen=True)
class EventSchedule:
    generator: str              # "GUIDED" or "RANDOM"
    seed: int
    mix: dict[GestureKind, float]
    events: tuple[GestureEvent, ...]


def _validate_mix(mix: Mapping[GestureKind, float]) -> dict[GestureKind, float]:
    clean = {k: float(v) for k, v in mix.items() if v > 0}
    if not clean:
        raise ValueError("gesture mix has no positive weights")
    total = sum(clean.values())
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise ValueError(f"gesture mix must sum to 1, got {total}")
    return clean


def _draw_kind(rng: random.Random, mix: Mapping[GestureKind, float]) -> GestureKind:
    r = rng.random()
    acc = 0.0
    last = None
    for kind in _KIND_ORDER:
        if kind not in mix:
            continue
        acc += mix[kind]
        last = kind
        if r < acc:
            return kind
    return last  # float leftovers land on the final kind


def _inset(rect: Rect) -> Rect:
    dx = rect.width * BOX_INSET_FRACTION
    dy = rect.height * BOX_INSET_FRACTION
    return Rect(rect.x_min + dx, rect.y_min + dy, rect.x_max - dx, rect.y_max - dy)


def _sample_times(t0: int, dur: int, n: int) -> list[int]:
    return [t0 + round(dur * k / (n - 1)) for k in range(n)]


def _tap(rng: random.Random, rect: Rect, t0: int, dur: int) -> tuple[tuple[TrackPoint, ...], ...]:
    x = rng.uniform(rect.x_min, rect.x_max)
    y = rng.uniform(rect.y_min, rect.y_max)
    return (((t0, x, y),),)


def _drag(rng: random.Random, rect: Rect, t0: int, dur: int) -> tuple[tuple[TrackPoint, ...], ...]:
    x0 = rng.uniform(rect.x_min, rect.x_max)
    y0 = rng.uniform(rect.y_min, rect.y_max)
    x1 = rng.uniform(rect.x_min, rect.x_max)
    y1 = rng.uniform(rect.y_min, rect.y_max)
    times = _sample_times(t0, dur, _TRACK_SAMPLES)
    track = tuple(
        (t, x0 + (x1 - x0) * k / (_TRACK_SAMPLES - 1), y0 + (y1 - y0) * k / (_TRACK_SAMPLES - 1))
        for k, t in enumerate(times)
    )
    return (track,)


def _radial_center(rng: random.Random, rect: Rect) -> tuple[float, float]:
    # keep the center away from the edges so there is room for the fingers
    cx = rect.x_min + rect.width * rng.uniform(0.35, 0.65)
    cy = rect.y_min + rect.height * rng.uniform(0.35, 0.65)
    return cx, cy


def _max_radius_along(rect: Rect, cx: float, cy: float, ux: float, uy: float) -> float:
    r = math.inf
    if abs(ux) > 1e-12:
        r = min(r, (rect.x_max - cx) / abs(ux), (cx - rect.x_min) / abs(ux))
    if abs(uy) > 1e-12:
        r = min(r, (rect.y_max - cy) / abs(uy), (cy - rect.y_min) / abs(uy))
    return max(r, 0.0)


def _pinch(rng: random.Random, rect: Rect, t0: int, dur: int) -> tuple[tuple[TrackPoint, ...], ...]:
    cx, cy = _radial_center(rng, rect)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    ux, uy = math.cos(theta), math.sin(theta)
    r_max = _max_radius_along(rect, cx, cy, ux, uy)
    r_lo = r_max * rng.uniform(0.10, 0.30)
    r_hi = r_max * rng.uniform(0.60, 0.95)
    if rng.random() < 0.5:
        r_lo, r_hi = r_hi, r_lo  # pinch in rather than out
    times = _sample_times(t0, dur, _TRACK_SAMPLES)
    a: list[TrackPoint] = []
    b: list[TrackPoint] = []
    for k, t in enumerate(times):
        r = r_lo + (r_hi - r_lo) * k / (_TRACK_SAMPLES - 1)
        a.append((t, cx + r * ux, cy + r * uy))
        b.append((t, cx - r * ux, cy - r * uy))
    return (tuple(a), tuple(b))


def _rotate(rng: random.Random, rect: Rect, t0: int, dur: int) -> tuple[tuple[TrackPoint, ...], ...]:
    cx, cy = _radial_center(rng, rect)
    r_max = min(rect.x_max - cx, cx - rect.x_min, rect.y_max - cy, cy - rect.y_min)
    r = max(r_max, 0.0) * rng.uniform(0.30, 0.80)
    theta0 = rng.uniform(0.0, 2.0 * math.pi)
    sweep = (math.pi / 2.0) * (1.0 if rng.random() < 0.5 else -1.0)
    times = _sample_times(t0, dur, _TRACK_SAMPLES)
    a: list[TrackPoint] = []
    b: list[TrackPoint] = []
    for k, t in enumerate(times):
        ang = theta0 + sweep * k / (_TRACK_SAMPLES - 1)
        a.append((t, cx + r * math.cos(ang), cy + r * math.sin(ang)))
        b.append((t, cx - r * math.cos(ang), cy - r * math.sin(ang)))
    return (tuple(a), tuple(b))


_BUILDERS: dict[GestureKind, Callable[..., tuple[tuple[TrackPoint, ...], ...]]] = {
    GestureKind.TAP: _tap,
    GestureKind.DRAG: _drag,
    GestureKind.PINCH: _pinch,
    GestureKind.ROTATE: _rotate,
}


def schedule_guided(
    opportunities: Sequence[TestOpportunity],
    duration_ms: int,
    seed: int,
    mix: Mapping[GestureKind, float] | None = None,
    min_gap_ms: int = DEFAULT_MIN_GAP_MS,
    durations_ms: Mapping[GestureKind, int] | None = None,
) -> EventSchedule:
    """Schedule gestures into active test opportunities.

    Each attempt draws a kind, picks one active opportunity uniformly (an
    opportunity is active when its window contains the attempt time), and
    places the gesture inside its stable box with a 5% inset.  The attempt is
    declined, with its slot still consumed, when no opportunity is active or
    the gesture cannot finish before the picked opportunity closes.
    """
    mix = _validate_mix(mix or DEFAULT_MIX)
    durations = dict(DEFAULT_DURATIONS_MS, **(durations_ms or {}))
    kind_rng = random.Random(seed)
    place_rng = random.Random(seed + _PLACEMENT_STREAM_OFFSET)
    opps = sorted(opportunities, key=lambda o: (o.start_ms, o.trackable_id, o.end_ms))
    events: list[GestureEvent] = []
    busy_until = 0
    t = 0
    while t < duration_ms:
        if t >= busy_until:
            kind = _draw_kind(kind_rng, mix)
            dur = durations[kind]
            busy_until = t + dur
            active = [o for o in opps if o.start_ms <= t <= o.end_ms]
            if active:
                opp = active[place_rng.randrange(len(active))]
                if t + dur <= opp.end_ms and t + dur <= duration_ms:
                    tracks = _BUILDERS[kind](place_rng, _inset(opp.stable_box), t, dur)
                    events.append(
                        GestureEvent(kind, t, t + dur, tracks, target_id=opp.trackable_id)
                    )
        t += min_gap_ms
    return EventSchedule("GUIDED", seed, mix, tuple(events))


def schedule_random(
    screen: tuple[int, int],
    duration_ms: int,
    seed: int,
    mix: Mapping[GestureKind, float] | None = None,
    min_gap_ms: int = DEFAULT_MIN_GAP_MS,
    durations_ms: Mapping[GestureKind, int] | None = None,
) -> EventSchedule:
    """Schedule gestures blindly over the whole screen (random baseline).

    Same attempt cadence as the guided generator; an attempt is emitted
    whenever the gesture finishes inside the schedule horizon.
    """
    mix = _validate_mix(mix or DEFAULT_MIX)
    durations = dict(DEFAULT_DURATIONS_MS, **(durations_ms or {}))
    kind_rng = random.Random(seed)
    place_rng = random.Random(seed + _PLACEMENT_STREAM_OFFSET)
    w, h = screen
    full = Rect(0.0, 0.0, float(w), float(h))
    events: list[GestureEvent] = []
    busy_until = 0
    t = 0
    while t < duration_ms:
        if t >= busy_until:
            kind = _draw_kind(kind_rng, mix)
            dur = durations[kind]
            busy_until = t + dur
            if t + dur <= duration_ms:
                tracks = _BUILDERS[kind](place_rng, full, t, dur)
                events.append(GestureEvent(kind, t, t + dur, tracks, target_id=None))
        t += min_gap_ms
    return EventSchedule("RANDOM", seed, mix, tuple(events))


def schedule_to_dict(schedule: EventSchedule) -> dict:
    return {
        "generator": schedule.generator,
        "seed": schedule.seed,
        "mix": {k.value: v for k, v in schedule.mix.items()},
        "events": [
            {
                "kind": ev.kind.value,
                "t": [ev.t_start_ms, ev.t_end_ms],
                "tracks": [[[t, x, y] for t, x, y in track] for track in ev.tracks],
                "target": ev.target_id,
            }
            for ev in schedule.events
        ],
    }


def schedule_from_dict(d: dict) -> EventSchedule:
    try:
        mix = {GestureKind(k): float(v) for k, v in d["mix"].items()}
        events = tuple(
            GestureEvent(
                kind=GestureKind(ed["kind"]),
                t_start_ms=int(ed["t"][0]),
                t_end_ms=int(ed["t"][1]),
                tracks=tuple(
                    tuple((int(t), float(x), float(y)) for t, x, y in track)
                    for track in ed["tracks"]
                ),
                target_id=ed.get("target"),
            )
            for ed in d["events"]
        )
        return EventSchedule(str(d["generator"]), int(d["seed"]), mix, events)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed schedule: {exc}") from None


def save_schedule(schedule: EventSchedule, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(schedule_to_dict(schedule), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_schedule(path: str | Path) -> EventSchedule:
    return schedule_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
