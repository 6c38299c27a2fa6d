"""Benchmark runners for the three task types, plus result output."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

from ..agent.loop import EpisodeConfig, EpisodeState, rerank_combat_order, run_episode
from ..agent.oracle import OracleBackend, default_script
from ..agent.prompts import LastRound, build_planner_prompt
from ..results import RunResult
from ..retrieval import SkillIndex, build_index
from ..skills.library import SkillLibrary, load_library
from ..world import sim
from ..world.errors import WorldError
from ..world.state import WorldState
from .metrics import AETMetrics, aet_metrics, aggregate, holdings_kinds
from .predicates import DPT_HINTS, DPT_PREDICATES
from .tasks import MonsterEntry, TaskSpec, parse_monsters

ARENA = {"h": 5, "r": 16, "y": 64}
LPT_BUDGET = 20
DPT_BUDGET = 40
AET_BUDGET = 80
AET_RELEVANCE = 0.05
RESULT_COLUMNS = ("task_id", "kind", "round", "seed", "success", "terminal", "ticks", "minutes", "llm_iters",
                  "health_remaining")
SERIES_COLUMNS = ("cycle", "distinct_items", "items_crafted_total", "recipes_and_advancements", "distance_traveled")


@dataclass
class Harness:
    library: SkillLibrary
    index: SkillIndex
    k: int = 5


@lru_cache(maxsize=1)
def default_harness() -> Harness:
    lib = load_library()
    return Harness(lib, build_index(lib.descriptions("compositional")))


def load_world_config(name: str | dict | None) -> dict:
    """A bundled world fixture by name, a path to one, or an inline dict."""
    if name is None:
        return {}
    if isinstance(name, dict):
        return dict(name)
    p = Path(name)
    if p.suffix == ".json" and p.exists():
        return json.loads(p.read_text())
    return json.loads(resources.files("craftagent.data").joinpath("worlds", f"{name}.json").read_text())


def oracle_for(spec: TaskSpec, harness: Harness | None = None) -> OracleBackend:
    """The scripted oracle, using the task's named exploration script when it has one."""
    h = harness or default_harness()
    script = spec.scenario.get("script")
    return OracleBackend(h.library, aet_tasks=default_script()[script] if script else None)


# -- combat ---------------------------------------------------------------------------

def setup_combat(world: WorldState, monsters, arena: dict | None = None,
                 resource_phase: Callable[[WorldState], None] | None = None) -> list[int]:
    """Respawn, let the agent gather and craft, then seal the arena, summon and arm the monsters."""
    entries = monsters if monsters and isinstance(monsters[0], MonsterEntry) else parse_monsters(monsters, world.tables)
    a = {**ARENA, **(arena or {})}
    sim.respawn_and_clear(world)
    if resource_phase:
        resource_phase(world)
    sim.combat_env(world, a["h"], a["r"], a["y"])
    ids = []
    for e in entries:
        ids.extend(sim.summon_mob(world, e.count, max(1, a["r"] // 3), e.species))
    sim.arm_hostiles(world)
    return ids


def _kill_skill(species: str) -> str:
    return "kill" + "".join(p.capitalize() for p in species.split("_"))


def fight(world: WorldState, order, library: SkillLibrary) -> bool:
    """Engage monsters in the given order; victory when the agent survives and none is left."""
    for label in order:
        entry = parse_monsters(label, world.tables)[0]
        name = _kill_skill(entry.species)
        if name in library:
            library.execute(name, world, recursive=False, quantity=entry.count)
        else:
            for _ in range(entry.count):
                e = sim.nearest_entity(world, entry.species)
                if e is None or not world.agent.alive:
                    break
                try:
                    sim.kill(world, e.id)
                except WorldError:
                    break
        if not world.agent.alive:
            return False
    return world.agent.alive and sim.nearest_entity(world, hostility="hostile") is None


def lpt_critique(plan, victory: bool, health: float) -> str:
    result = f"victory with {health:.1f} / 20 health remaining" if victory else "defeat"
    return f"Subgoal list of last round: {json.dumps(list(plan))}. Result: {result}."


def run_lpt(spec: TaskSpec, backend, rounds: int | None = None, seed: int | None = None,
            harness: Harness | None = None, world: WorldState | None = None, detail: list | None = None) -> list[RunResult]:
    """Multi-round combat: plan equipment, craft it, fight, and feed the outcome into the next round."""
    h = harness or default_harness()
    rounds = rounds or int(spec.scenario.get("rounds", 1))
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    seed = spec.seed_base if seed is None else seed
    world = world or sim.new_world(seed, load_world_config(spec.scenario.get("world", "lpt_arena")))
    entries = parse_monsters(spec.scenario["monsters"], world.tables)
    labels = [e.label() for e in entries]
    cfg = EpisodeConfig(k=h.k)
    last: LastRound | None = None
    out = []
    for rnd in range(1, rounds + 1):
        state = EpisodeState(mode="LPT", goal=labels, round=rnd, last_round=last)
        prompt = build_planner_prompt("LPT", None, state, labels)
        crafted: dict = {}

        def resource_phase(w: WorldState) -> None:
            clock0 = w.clock
            run_episode("LPT", labels, int(spec.scenario.get("budget", LPT_BUDGET)), w, backend, h.index,
                        h.library, config=cfg, state=state, task_id=spec.id)
            crafted["ticks"] = w.clock - clock0
            crafted["equipment"] = w.agent.equipment.as_list()

        setup_combat(world, entries, spec.scenario.get("arena"), resource_phase)
        order = rerank_combat_order(labels, backend, state)
        victory = fight(world, order, h.library)
        health = float(world.agent.health) if victory else 0.0
        plan = list(state.last_plan.subgoals) if state.last_plan else []
        critique = lpt_critique(plan, victory, health)
        last = LastRound(crafted["equipment"], health, critique)
        out.append(RunResult(spec.id, rnd, victory, crafted["ticks"], state.llm_iters,
                             "success" if victory else "defeat", health, seed))
        if detail is not None:
            detail.append({"round": rnd, "plan": plan, "equipment": crafted["equipment"], "order": order,
                           "critique": critique, "prompt": [m.to_dict() for m in prompt],
                           "role_calls": dict(state.role_calls)})
        if not world.agent.alive:
            sim.respawn_after_death(world)
    return out


# -- planning and exploration ----------------------------------------------------------------

def run_dpt(spec: TaskSpec, backend, seed: int | None = None, harness: Harness | None = None,
            world: WorldState | None = None, detail: dict | None = None) -> RunResult:
    """Step-by-step planning toward one goal, with prerequisite recursion switched off."""
    h = harness or default_harness()
    goal = spec.scenario["goal"]
    seed = spec.seed_base if seed is None else seed
    world = world or sim.new_world(seed, load_world_config(spec.scenario.get("world", "dpt_farm")))
    cfg = EpisodeConfig(k=h.k, recursive=False, reference=DPT_HINTS.get(goal))
    state, result = run_episode("DPT", goal, int(spec.scenario.get("budget", DPT_BUDGET)), world, backend, h.index,
                                h.library, goal_predicate=DPT_PREDICATES[goal], config=cfg, task_id=spec.id)
    if detail is not None:
        detail.update(trace=list(state.trace), completed=list(state.completed_tasks), role_calls=dict(state.role_calls))
    return result


def run_aet(spec: TaskSpec, backend, seed: int | None = None, harness: Harness | None = None,
            world: WorldState | None = None, series: list | None = None,
            detail: dict | None = None) -> tuple[RunResult, AETMetrics]:
    """Free exploration for a fixed number of cycles, counting distinct items held at cycle boundaries."""
    h = harness or default_harness()
    seed = spec.seed_base if seed is None else seed
    if world is None:
        wcfg = load_world_config(spec.scenario.get("world"))
        wcfg.setdefault("difficulty", "peaceful")
        world = sim.new_world(seed, wcfg)
    distinct: set[str] = holdings_kinds(world)
    rows = series if series is not None else []

    def on_cycle(state: EpisodeState, w: WorldState) -> None:
        distinct.update(holdings_kinds(w))
        m = aet_metrics(w, distinct)
        rows.append({"cycle": state.llm_iters, **m.to_dict()})

    cfg = EpisodeConfig(k=int(spec.scenario.get("k", h.k)), ablation=bool(spec.scenario.get("ablation", False)),
                        relevance_threshold=spec.scenario.get("relevance_threshold", AET_RELEVANCE))
    state, result = run_episode("AET", None, int(spec.scenario.get("budget", AET_BUDGET)), world, backend, h.index,
                                h.library, config=cfg, on_cycle=on_cycle, task_id=spec.id)
    result.success = result.terminal != "agent_dead"
    if detail is not None:
        detail.update(distinct=sorted(distinct), completed=list(state.completed_tasks),
                      role_calls=dict(state.role_calls))
    return result, aet_metrics(world, distinct)


# -- suites ---------------------------------------------------------------------------------

@dataclass
class TaskRun:
    spec: TaskSpec
    results: list[RunResult]
    series: list[dict]


def run_task(spec: TaskSpec, backend_factory: Callable[[TaskSpec], object] | None = None,
             harness: Harness | None = None, workers: int = 1) -> TaskRun:
    """All repetitions of a task, one world and backend per repetition."""
    h = harness or default_harness()
    factory = backend_factory or (lambda s: oracle_for(s, h))

    def one(i: int):
        seed = spec.seed_base + i
        backend = factory(spec)
        if spec.kind.startswith("LPT"):
            return run_lpt(spec, backend, seed=seed, harness=h), []
        if spec.kind == "DPT":
            return [run_dpt(spec, backend, seed=seed, harness=h)], []
        series: list[dict] = []
        res, _ = run_aet(spec, backend, seed=seed, harness=h, series=series)
        for row in series:
            row["seed"] = seed
        return [res], series

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(one, range(spec.repetitions)))
    return TaskRun(spec, [r for rs, _ in parts for r in rs], [row for _, s in parts for row in s])


def summarize(run: TaskRun) -> list[dict]:
    """One aggregate per round (single-round tasks have round 1 only)."""
    rounds = sorted({r.round for r in run.results})
    out = []
    for rnd in rounds:
        stats = aggregate([r for r in run.results if r.round == rnd]).to_dict()
        stats.update(kind=run.spec.kind, round=rnd)
        out.append(stats)
    return out


def write_results(runs: list[TaskRun], out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"results": out / "results.csv", "summary": out / "summary.json"}
    with open(paths["results"], "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        w.writeheader()
        for run in runs:
            for r in run.results:
                d = r.to_dict()
                w.writerow({c: (run.spec.kind if c == "kind" else d.get(c)) for c in RESULT_COLUMNS})
    summary = [s for run in runs for s in summarize(run)]
    paths["summary"].write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    for run in runs:
        if run.series:
            p = out / f"aet_series_{run.spec.id}.csv"
            with open(p, "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=("seed",) + SERIES_COLUMNS)
                w.writeheader()
                for row in run.series:
                    w.writerow({c: row.get(c) for c in ("seed",) + SERIES_COLUMNS})
            paths[f"series:{run.spec.id}"] = p
    return paths
