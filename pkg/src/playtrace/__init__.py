"""Stable-area analysis and gesture scheduling for AR playback traces."""

from .geometry import Rect, rect_area, rect_intersect
from .lifespan import TestOpportunity, filter_by_duration, intersect_runs, life_spans
from .metrics import VideoMetrics, compute_metrics
from .pipeline import AnalysisParams, analyze_run, analyze_runs
from .scheduler import EventSchedule, GestureEvent, GestureKind, schedule_guided, schedule_random
from .simulator import Jitter, SimScene, execute_schedule, generate_trace, hit_test, load_scene
from .trace import PlaybackTrace, load_trace, sample_frames, save_trace
from .visibility import VisibleBox, analyze_frame

__version__ = "0.1.0"

__all__ = [
    "AnalysisParams",
    "EventSchedule",
    "GestureEvent",
    "GestureKind",
    "Jitter",
    "PlaybackTrace",
    "Rect",
    "SimScene",
    "TestOpportunity",
    "VideoMetrics",
    "VisibleBox",
    "analyze_frame",
    "analyze_run",
    "analyze_runs",
    "compute_metrics",
    "execute_schedule",
    "filter_by_duration",
    "generate_trace",
    "hit_test",
    "intersect_runs",
    "life_spans",
    "load_scene",
    "load_trace",
    "rect_area",
    "rect_intersect",
    "sample_frames",
    "save_trace",
    "schedule_guided",
    "schedule_random",
    "__version__",
]
