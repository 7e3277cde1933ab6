"""Report output: opportunity JSON and a Gantt-style SVG timeline.

Both writers are deterministic: the same inputs produce byte-identical
files, which makes reports diffable and cacheable.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from .geometry import Rect
from .lifespan import TestOpportunity
from .metrics import VideoMetrics, metrics_to_dict

# lane colors, cycled by lane index
PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#59a14f",
    "#e15759",
    "#b07aa1",
    "#76b7b2",
    "#edc948",
    "#9c755f",
)

CHART_WIDTH_PX = 1000
_MARGIN_LEFT = 150
_MARGIN_RIGHT = 30
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 45
_LANE_HEIGHT = 30
_LANE_GAP = 10


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _lane_order(opportunities: Sequence[TestOpportunity]) -> list[str]:
    first_seen: dict[str, int] = {}
    for o in opportunities:
        cur = first_seen.get(o.trackable_id)
        if cur is None or o.start_ms < cur:
            first_seen[o.trackable_id] = o.start_ms
    return sorted(first_seen, key=lambda tid: (first_seen[tid], tid))


def _tick_step_ms(duration_ms: int) -> int:
    # aim for 5 to 12 labeled ticks with a round second step
    for step_s in (1, 2, 5, 10, 15, 30, 60, 120, 300):
        if duration_ms / (step_s * 1000.0) <= 12:
            return step_s * 1000
    return 600_000


def render_gantt(
    opportunities: Sequence[TestOpportunity],
    duration_ms: int,
    chart_width_px: int = CHART_WIDTH_PX,
) -> str:
    """Timeline SVG: one lane per trackable, one block per opportunity.

    Block x extents are linear in time over the chart width, so block
    widths are proportional to opportunity durations.  Blocks carry
    class="block" plus data attributes with their raw timing, which keeps
    the output machine-checkable.
    """
    if duration_ms <= 0:
        raise ValueError("duration_ms must be positive")
    lanes = _lane_order(opportunities)
    lane_index = {tid: i for i, tid in enumerate(lanes)}
    height = _MARGIN_TOP + max(1, len(lanes)) * (_LANE_HEIGHT + _LANE_GAP) + _MARGIN_BOTTOM
    width = _MARGIN_LEFT + chart_width_px + _MARGIN_RIGHT
    scale = chart_width_px / duration_ms

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">'
    )
    parts.append(
        f'<text x="{_MARGIN_LEFT}" y="20" font-size="14">Test opportunities over time</text>'
    )
    axis_y = height - _MARGIN_BOTTOM + 10
    parts.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{axis_y}" x2="{_MARGIN_LEFT + chart_width_px}" '
        f'y2="{axis_y}" stroke="#333" stroke-width="1"/>'
    )
    step = _tick_step_ms(duration_ms)
    t = 0
    while t <= duration_ms:
        x = _MARGIN_LEFT + t * scale
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{axis_y}" x2="{_fmt(x)}" y2="{axis_y + 5}" '
            f'stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{axis_y + 18}" text-anchor="middle">{t // 1000}s</text>'
        )
        t += step
    for tid in lanes:
        y = _MARGIN_TOP + lane_index[tid] * (_LANE_HEIGHT + _LANE_GAP)
        parts.append(
            f'<text x="{_MARGIN_LEFT - 10}" y="{y + _LANE_HEIGHT / 2 + 4:.0f}" '
            f'text-anchor="end">{_escape(tid)}</text>'
        )
    ordered = sorted(
        opportunities, key=lambda o: (o.start_ms, o.trackable_id, o.end_ms)
    )
    for o in ordered:
        idx = lane_index[o.trackable_id]
        y = _MARGIN_TOP + idx * (_LANE_HEIGHT + _LANE_GAP)
        x = _MARGIN_LEFT + o.start_ms * scale
        w = (o.end_ms - o.start_ms) * scale
        color = PALETTE[idx % len(PALETTE)]
        box = o.stable_box
        label = f"{box.width:.0f}x{box.height:.0f} px"
        parts.append(
            f'<rect class="block" data-id="{_escape(o.trackable_id)}" '
            f'data-start-ms="{o.start_ms}" data-end-ms="{o.end_ms}" '
            f'x="{_fmt(x)}" y="{y}" width="{_fmt(w)}" height="{_LANE_HEIGHT}" '
            f'fill="{color}" fill-opacity="0.85" stroke="#222" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + 4)}" y="{y + _LANE_HEIGHT / 2 + 4:.0f}" '
            f'font-size="10" fill="#111">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def opportunities_to_dict(
    opportunities: Sequence[TestOpportunity],
    params: Mapping[str, Any],
    metrics: VideoMetrics | None = None,
) -> dict:
    ordered = sorted(
        opportunities, key=lambda o: (o.start_ms, o.trackable_id, o.end_ms)
    )
    out: dict[str, Any] = {
        "opportunities": [
            {
                "id": o.trackable_id,
                "box": o.stable_box.as_list(),
                "start_ms": o.start_ms,
                "end_ms": o.end_ms,
            }
            for o in ordered
        ],
        "params": dict(params),
    }
    if metrics is not None:
        out["metrics"] = metrics_to_dict(metrics)
    return out


def dump_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_report(
    opportunities: Sequence[TestOpportunity],
    params: Mapping[str, Any],
    path: str | Path,
    metrics: VideoMetrics | None = None,
) -> None:
    dump_json(opportunities_to_dict(opportunities, params, metrics), path)


def load_report(path: str | Path) -> tuple[list[TestOpportunity], dict]:
    """Read back a report written by write_report.

    Frame index sets are not stored in reports, so they come back empty.
    """
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        opps = [
            TestOpportunity(
                trackable_id=str(od["id"]),
                stable_box=Rect(*[float(v) for v in od["box"]]),
                start_ms=int(od["start_ms"]),
                end_ms=int(od["end_ms"]),
                frame_indices=(),
            )
            for od in d["opportunities"]
        ]
        params = dict(d["params"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed report: {exc}") from None
    return opps, params
