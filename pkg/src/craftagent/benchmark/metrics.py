"""Exploration metrics and success-only aggregation."""
from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean, pstdev

from ..results import RunResult
from ..world.state import WorldState

NA = "N/A"


class EmptyResults(ValueError):
    """aggregate() was given no results."""


@dataclass
class AETMetrics:
    distinct_items: int
    items_crafted_total: int
    recipes_and_advancements: int
    distance_traveled: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def milestones_reached(world: WorldState, held: set[str]) -> set[str]:
    t = world.tables
    out = set()
    for m in t.milestones:
        if "held" in m and held.intersection(t.expand(m["held"])):
            out.add(m["id"])
        elif "event" in m and m["event"] in world.events:
            out.add(m["id"])
    return out


def holdings_kinds(world: WorldState) -> set[str]:
    """Item kinds in the inventory or equipment right now."""
    kinds = {k for k, n in world.agent.inventory.counts().items() if n > 0}
    return kinds | {e for e in world.agent.equipment.as_list() if e}


def aet_metrics(world: WorldState, distinct: set[str]) -> AETMetrics:
    return AETMetrics(len(distinct), world.items_crafted,
                      len(world.recipes_crafted) + len(milestones_reached(world, world.held_ever)),
                      float(world.distance))


@dataclass
class MetricStats:
    mean: float | str
    std: float | str

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std}


@dataclass
class AggregateStats:
    task_id: str
    successes: int
    total: int
    metrics: dict[str, MetricStats]

    @property
    def success_rate(self) -> str:
        return f"{self.successes} / {self.total}"

    def to_dict(self) -> dict:
        return {"task_id": self.task_id, "success_rate": self.success_rate,
                "metrics": {k: v.to_dict() for k, v in self.metrics.items()}}


def _stats(values: list[float]) -> MetricStats:
    if not values:
        return MetricStats(NA, NA)
    return MetricStats(fmean(values), pstdev(values))


def aggregate(results) -> AggregateStats:
    """Success rate over all runs; mean and population std over successful runs only."""
    results = list(results)
    if not results:
        raise EmptyResults("no results to aggregate")
    ids = {r.task_id for r in results}
    if len(ids) != 1:
        raise ValueError(f"results span several tasks: {sorted(ids)}")
    ok: list[RunResult] = [r for r in results if r.success]
    metrics = {
        "minutes": _stats([r.minutes for r in ok]),
        "llm_iters": _stats([float(r.llm_iters) for r in ok]),
    }
    if any(r.health_remaining is not None for r in results):
        metrics["health"] = _stats([r.health_remaining for r in ok if r.health_remaining is not None])
    return AggregateStats(results[0].task_id, len(ok), len(results), metrics)
