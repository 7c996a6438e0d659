"""Episode runner, bundled scenarios, benchmarks and rendering."""

from .bench import BenchSuite, bench, format_table, load_suite, resolve_scenario
from .builtin import builtin_scenario, load_builtin_scenarios
from .episode import (
    UNFINISHED,
    EpisodeMetrics,
    EpisodeTrace,
    PolicyActionError,
    PolicyRoleError,
    load_trace,
    metrics_from_trace,
    run_episode,
    save_trace,
)
from .render import render_trace

__all__ = [
    "BenchSuite",
    "EpisodeMetrics",
    "EpisodeTrace",
    "PolicyActionError",
    "PolicyRoleError",
    "UNFINISHED",
    "bench",
    "builtin_scenario",
    "format_table",
    "load_builtin_scenarios",
    "load_suite",
    "load_trace",
    "metrics_from_trace",
    "render_trace",
    "resolve_scenario",
    "run_episode",
    "save_trace",
]
