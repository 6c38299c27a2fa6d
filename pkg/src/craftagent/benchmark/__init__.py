"""Long-term planning, dynamic-immediate planning and autonomous exploration benchmark."""
from ..results import RunResult
from .metrics import NA, AETMetrics, AggregateStats, EmptyResults, MetricStats, aet_metrics, aggregate
from .predicates import DPT_HINTS, DPT_PATHS, DPT_PREDICATES, matches_path
from .runner import (ARENA, Harness, TaskRun, default_harness, fight, load_world_config, lpt_critique, oracle_for,
                     run_aet, run_dpt, run_lpt, run_task, setup_combat, summarize, write_results)
from .tasks import KINDS, MonsterEntry, TaskSpec, load_suite, parse_monsters

__all__ = [
    "RunResult", "NA", "AETMetrics", "AggregateStats", "EmptyResults", "MetricStats", "aet_metrics", "aggregate",
    "DPT_HINTS", "DPT_PATHS", "DPT_PREDICATES", "matches_path", "ARENA", "Harness", "TaskRun", "default_harness",
    "fight", "load_world_config", "lpt_critique", "oracle_for", "run_aet", "run_dpt", "run_lpt", "run_task",
    "setup_combat", "summarize", "write_results", "KINDS", "MonsterEntry", "TaskSpec", "load_suite",
    "parse_monsters",
]
