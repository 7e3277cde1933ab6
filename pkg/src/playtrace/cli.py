"""Command line interface.

Subcommands:
  analyze    traces -> opportunity report (JSON + Gantt SVG)
  schedule   opportunity report -> guided gesture schedule
  simulate   scene + schedule -> gesture outcomes
  compare    scene -> guided vs random success rates over several seeds
  scenes     write the built-in benchmark scene pack to disk

Exit codes: 0 on success, 1 for validation problems in the inputs, 2 for
I/O failures such as missing files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .lifespan import DEFAULT_MIN_LIFESPAN_S, DEFAULT_MIN_VISIBILITY
from .pipeline import DEFAULT_ANALYSIS_FPS, AnalysisParams, analyze_runs
from .reporting import dump_json, load_report, render_gantt, write_report
from .scenes import benchmark_scenes
from .scheduler import (
    DEFAULT_MIN_GAP_MS,
    GestureKind,
    load_schedule,
    save_schedule,
    schedule_guided,
    schedule_random,
)
from .simulator import (
    Jitter,
    SceneError,
    execute_schedule,
    generate_trace,
    gsr_summary,
    load_scene,
    outcomes_to_dict,
    scene_from_dict,
    save_scene,
)
from .trace import TraceError, load_trace


def parse_mix(text: str) -> dict[GestureKind, float]:
    """Parse "TAP=0.55,DRAG=0.25,PINCH=0.1,ROTATE=0.1" into a mix dict."""
    mix: dict[GestureKind, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad mix entry {part!r}, expected KIND=WEIGHT")
        name, raw = part.split("=", 1)
        try:
            kind = GestureKind(name.strip().upper())
        except ValueError:
            raise ValueError(f"unknown gesture kind {name.strip()!r}") from None
        mix[kind] = float(raw)
    if not mix:
        raise ValueError("empty gesture mix")
    return mix


def _jitter_from_meta(meta: dict) -> Jitter:
    jd = meta.get("jitter", {})
    return Jitter(
        vertex_noise_m=float(jd.get("vertex_noise_m", 0.0)),
        dropout_prob=float(jd.get("dropout_prob", 0.0)),
    )


def cmd_analyze(args: argparse.Namespace) -> int:
    traces = [load_trace(p) for p in args.traces]
    params = AnalysisParams(
        fps=args.fps,
        min_visibility=args.min_visibility,
        min_lifespan_s=args.min_lifespan,
    )
    if len(traces) == 1 and args.runs > 1:
        meta = traces[0].metadata
        if "scene" not in meta:
            raise ValueError(
                "multi-run analysis of a single trace needs a scene description "
                "embedded in the trace metadata"
            )
        scene = scene_from_dict(meta["scene"])
        jitter = _jitter_from_meta(meta)
        traces = [
            generate_trace(scene, args.jitter_seed_base + r, jitter)
            for r in range(args.runs)
        ]
    per_run, final, metrics = analyze_runs(traces, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params_dict = {
        "fps": params.fps,
        "min_visibility": params.min_visibility,
        "min_lifespan_s": params.min_lifespan_s,
        "runs": len(traces),
    }
    write_report(final, params_dict, out / "report.json", metrics=metrics)
    duration = max(max(t.duration_ms for t in traces), 1)
    (out / "gantt.svg").write_text(render_gantt(final, duration), encoding="utf-8")
    print(f"{len(final)} opportunities across {len(traces)} run(s) -> {out}")
    return 0


def cmd_schedule(args: argparse.Namespace) -> int:
    opps, _params = load_report(args.report)
    duration = args.duration_ms
    if duration is None:
        duration = max((o.end_ms for o in opps), default=0)
    mix = parse_mix(args.mix) if args.mix else None
    sched = schedule_guided(
        opps, duration, args.seed, mix=mix, min_gap_ms=args.min_gap_ms
    )
    save_schedule(sched, args.out)
    print(f"{len(sched.events)} guided gestures -> {args.out}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    scene = load_scene(args.scene)
    sched = load_schedule(args.schedule)
    outcomes, summary = execute_schedule(scene, sched)
    dump_json(outcomes_to_dict(outcomes, summary), args.out)
    overall = summary["overall"]
    shown = "n/a" if overall is None else f"{overall:.1%}"
    print(f"{len(outcomes)} gestures, overall success {shown} -> {args.out}")
    return 0


def _fmt_rate(v: float | None) -> str:
    return " n/a" if v is None else f"{v:5.1%}"


def cmd_compare(args: argparse.Namespace) -> int:
    scene = load_scene(args.scene)
    params = AnalysisParams()
    per_seed = []
    pooled_guided = []
    pooled_random = []
    for seed in args.seeds:
        traces = [
            generate_trace(scene, seed * 100 + r, scene.default_jitter)
            for r in range(args.runs)
        ]
        _per_run, final, _metrics = analyze_runs(traces, params)
        guided = schedule_guided(final, scene.duration_ms, seed)
        rand = schedule_random(
            (scene.screen_w, scene.screen_h), scene.duration_ms, seed
        )
        g_out, g_sum = execute_schedule(scene, guided)
        r_out, r_sum = execute_schedule(scene, rand)
        pooled_guided.extend(g_out)
        pooled_random.extend(r_out)
        per_seed.append(
            {
                "seed": seed,
                "opportunity_count": len(final),
                "guided": {"events": len(g_out), "gsr": g_sum},
                "random": {"events": len(r_out), "gsr": r_sum},
            }
        )
    result = {
        "scene": scene.name,
        "seeds": list(args.seeds),
        "runs": args.runs,
        "per_seed": per_seed,
        "aggregate": {
            "guided": {"events": len(pooled_guided), "gsr": gsr_summary(pooled_guided)},
            "random": {"events": len(pooled_random), "gsr": gsr_summary(pooled_random)},
        },
    }
    if args.out:
        dump_json(result, args.out)
    kinds = [k.value for k in GestureKind] + ["overall"]
    print(f"scene: {scene.name}")
    header = "generator events " + " ".join(f"{k:>7}" for k in kinds)
    print(header)
    for label, pool in (("guided", pooled_guided), ("random", pooled_random)):
        summary = gsr_summary(pool)
        cells = " ".join(f"{_fmt_rate(summary[k]):>7}" for k in kinds)
        print(f"{label:<9} {len(pool):6d} {cells}")
    return 0


def cmd_scenes(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for scene in benchmark_scenes():
        save_scene(scene, out / f"{scene.name}.json")
    print(f"{len(benchmark_scenes())} scenes -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="playtrace",
        description="Find stable interactive areas in AR playback traces and schedule gestures into them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="turn traces into an opportunity report")
    p.add_argument("traces", nargs="+", help="trace files (several files = several runs)")
    p.add_argument("--fps", type=float, default=DEFAULT_ANALYSIS_FPS)
    p.add_argument("--min-visibility", type=float, default=DEFAULT_MIN_VISIBILITY)
    p.add_argument("--min-lifespan", type=float, default=DEFAULT_MIN_LIFESPAN_S)
    p.add_argument(
        "--runs",
        type=int,
        default=1,
        help="with a single simulator trace: regenerate this many jittered runs",
    )
    p.add_argument("--jitter-seed-base", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("schedule", help="build a guided gesture schedule from a report")
    p.add_argument("report", help="report.json from the analyze step")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mix", help="e.g. TAP=0.55,DRAG=0.25,PINCH=0.10,ROTATE=0.10")
    p.add_argument("--min-gap-ms", type=int, default=DEFAULT_MIN_GAP_MS)
    p.add_argument("--duration-ms", type=int, default=None)
    p.add_argument("--out", required=True, help="output schedule file")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="execute a schedule against a scene")
    p.add_argument("scene", help="scene description file")
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", required=True, help="output outcome file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="guided vs random gestures on one scene")
    p.add_argument("scene", help="scene description file")
    p.add_argument("--seeds", type=int, nargs="+", default=[1])
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--out", help="optional output JSON file")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scenes", help="write the benchmark scene pack")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_scenes)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TraceError, SceneError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
