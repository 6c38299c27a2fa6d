"""Prompt assembly from the bundled templates."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from string import Template
from typing import Any, Mapping

from ..world.state import Observation
from .errors import MissingField
from .messages import ChatMessage, system, user

OBSERVATION_FIELDS = (
    "biome", "time_of_day", "nearby_blocks", "recently_seen_blocks", "nearby_entities", "health",
    "hunger", "position", "equipment", "inventory", "inventory_used", "chests",
)
PLANNER_TEMPLATES = {"LPT": "lpt_system", "DPT": "dpt_system", "AET": "aet_system"}
ABLATION_TEMPLATE = "ablation_planner_system"


@lru_cache(maxsize=None)
def template(name: str) -> str:
    return resources.files("craftagent.data").joinpath("prompts", f"{name}.txt").read_text()


def render(name: str, **values: Any) -> str:
    """Fill a template; every placeholder must be supplied."""
    try:
        return Template(template(name)).substitute(values)
    except KeyError as exc:
        raise MissingField(f"template {name} needs {exc.args[0]}") from None


@dataclass(frozen=True)
class LastRound:
    """What a multi-round LPT planner sees about the previous round."""

    equipment: list
    health: float
    critique: str


# -- value formatting -----------------------------------------------------------

def fmt_list(items) -> str:
    items = list(items or [])
    return ", ".join(str(i) for i in items) if items else "None"


def fmt_inventory(inv: Mapping[str, int]) -> str:
    return repr(dict(inv))


def fmt_position(p) -> str:
    return f"x={p.x}, y={p.y}, z={p.z}"


def fmt_vital(v: float) -> str:
    return f"{float(v):.1f}"


def slots_used(inv: Mapping[str, int], stack_size=lambda k: 64) -> int:
    return sum(-(-n // stack_size(k)) for k, n in inv.items() if n > 0)


def _observation(obs) -> Observation:
    if obs is None:
        raise MissingField("observation is required")
    if isinstance(obs, Observation):
        return obs
    if isinstance(obs, Mapping):
        missing = [f for f in OBSERVATION_FIELDS if f not in obs and f != "chests"]
        if missing:
            raise MissingField(f"observation lacks {', '.join(missing)}")
        return Observation(**{f: obs.get(f) for f in OBSERVATION_FIELDS})
    raise MissingField(f"observation of type {type(obs).__name__} is not usable")


def _failed_summary(state) -> str:
    failed = list(getattr(state, "failed_tasks", []) or [])
    counts: dict[str, int] = {}
    for t in failed:
        counts[t] = counts.get(t, 0) + 1
    hard = getattr(state, "too_hard_threshold", 3)
    out = [f"{t} (too hard)" if n > hard else t for t, n in counts.items()]
    return fmt_list(out)


# -- planner ------------------------------------------------------------------------

def build_planner_prompt(mode: str, observation, episode_state, goal=None, reference: str | None = None,
                         ablation: bool = False) -> list[ChatMessage]:
    """System template for the mode plus a user message listing fields in template order."""
    if mode == "LPT":
        return _lpt_prompt(episode_state, goal)
    if mode not in ("DPT", "AET"):
        raise ValueError(f"unknown planner mode {mode}")
    completed = fmt_list(getattr(episode_state, "completed_tasks", []))
    failed = _failed_summary(episode_state)
    if ablation:
        body = f"Completed tasks so far: {completed}\nFailed tasks that are too hard: {failed}"
        return [system(render(ABLATION_TEMPLATE)), user(body)]
    obs = _observation(observation)
    inv = f"Inventory ({obs.inventory_used}/36): {fmt_inventory(obs.inventory)}"
    if mode == "DPT":
        if not goal or not str(goal).strip():
            raise MissingField("DPT needs an ultimate goal")
        logs = getattr(episode_state, "last_log", None) or []
        lines = [
            f"Ultimate goal: {goal}",
            f"Reference: {reference or 'None'}",
            f"Biome: {obs.biome}",
            f"Nearby blocks: {fmt_list(obs.nearby_blocks)}",
            f"Other blocks that are recently seen: {fmt_list(obs.recently_seen_blocks)}",
            f"Nearby entities (nearest to farthest): {fmt_list(obs.nearby_entities)}",
            f"Health: {fmt_vital(obs.health)}",
            f"Hunger: {fmt_vital(obs.hunger)}",
            inv,
            f"Logs: {' '.join(logs) if logs else 'None'}",
            f"Completed tasks so far: {completed}",
            f"Failed tasks that are too hard: {failed}",
        ]
        return [system(render("dpt_system", goal=goal)), user("\n".join(lines))]
    lines = [
        f"Biome: {obs.biome}",
        f"Time: {obs.time_of_day}",
        f"Nearby blocks: {fmt_list(obs.nearby_blocks)}",
        f"Other blocks that are recently seen: {fmt_list(obs.recently_seen_blocks)}",
        f"Nearby entities (nearest to farthest): {fmt_list(obs.nearby_entities)}",
        f"Health: {fmt_vital(obs.health)}",
        f"Hunger: {fmt_vital(obs.hunger)}",
        f"Position: {fmt_position(obs.position)}",
        f"Equipment: {obs.equipment!r}",
        inv,
        f"Chests: {obs.chests if obs.chests else 'None'}",
        f"Completed tasks so far: {completed}",
        f"Failed tasks that are too hard: {failed}",
    ]
    return [system(render("aet_system")), user("\n".join(lines))]


def _lpt_prompt(state, monsters) -> list[ChatMessage]:
    monsters = list(monsters or [])
    if not monsters:
        raise MissingField("LPT needs the monster list")
    rnd = getattr(state, "round", 1)
    last: LastRound | None = getattr(state, "last_round", None)
    if rnd > 1 and last is None:
        raise MissingField("rounds after the first need last round's equipment, health and critique")
    if last is None:
        equipment = health = critique = "None"
    else:
        equipment = repr(list(last.equipment))
        health = f"{fmt_vital(last.health)} / 20"
        critique = last.critique or "None"
    lines = [
        f"Equipment obtained from last round: {equipment}",
        f"Health after last combat: {health}",
        f"Critique: {critique}",
        f"Monster: {', '.join(monsters)}",
    ]
    return [system(render("lpt_system")), user("\n".join(lines))]


# -- other roles ----------------------------------------------------------------------

def combat_order_messages(monsters) -> list[ChatMessage]:
    return [system(render("combat_order_system")), user(json.dumps(list(monsters)))]


def query_context_messages(subgoal: str) -> list[ChatMessage]:
    return [system(render("query_context_system")), user(render("query_context_user", subgoal=subgoal))]


def skill_selection_messages(task: str, candidates, last_program: str | None = None,
                             critique: str | None = None) -> list[ChatMessage]:
    """`candidates` is a list of (name, description) pairs."""
    programs = "\n".join(f"{name}: {desc}" for name, desc in candidates)
    body = (f"Task: {task}\nPrograms:\n{programs}\n"
            f"Program used in the last round: {last_program or 'None'}\nCritique: {critique or 'None'}")
    return [system(render("skill_selection_system")), user(body)]


def critic_user_content(task: str, observation, inventory_before: Mapping[str, int], used_before: int,
                        chat_log) -> str:
    obs = _observation(observation)
    parts = [
        f"Task: {task}",
        f"Nearby blocks: {fmt_list(obs.nearby_blocks)}",
        f"Entities: {fmt_list(obs.nearby_entities)}",
        f"Equipment: {obs.equipment!r}",
        f"Chests: {obs.chests if obs.chests else 'None'}",
        f"Current Inventory ({obs.inventory_used}/36): {fmt_inventory(obs.inventory)}",
        f"Last Inventory ({used_before}/36): {fmt_inventory(inventory_before)}",
        f"Chat log: {' '.join(chat_log) if chat_log else 'None'}",
    ]
    return "\n\n".join(parts)


def critic_messages(task: str, observation, inventory_before, used_before: int, chat_log) -> list[ChatMessage]:
    return [system(render("critic_system")),
            user(critic_user_content(task, observation, inventory_before, used_before, chat_log))]
