"""Planner, actor and critic wired into one feedback loop."""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..results import RunResult
from ..retrieval import SkillIndex, query_context, query_top_k
from ..skills.library import SkillLibrary, SkillOutcome
from ..world import sim
from ..world.state import WorldState
from .errors import AgentError, ChoiceNotInCandidates, FormatViolation, NotAPermutation, ParseFailed
from .messages import ChatMessage, user
from .parsing import (REPAIR_SUFFIX, ActorChoice, CriticVerdict, PlannerOutput, parse_actor, parse_combat_order,
                      parse_critic, parse_planner)
from .prompts import (LastRound, build_planner_prompt, combat_order_messages, critic_messages,
                      skill_selection_messages, slots_used)

DEFAULT_K = 5
FAILED_CAP = 50
TOO_HARD_AFTER = 3
_QUANTITY = re.compile(r"\b(\d+)\b")


@dataclass
class EpisodeState:
    mode: str = "AET"
    goal: object = None
    completed_tasks: list[str] = field(default_factory=list)
    failed_tasks: list[str] = field(default_factory=list)
    last_plan: PlannerOutput | None = None
    last_critique: str = ""
    last_log: list[str] = field(default_factory=list)
    last_program: str | None = None
    llm_iters: int = 0
    role_calls: dict[str, int] = field(default_factory=dict)
    round: int = 1
    last_round: LastRound | None = None
    too_hard_threshold: int = TOO_HARD_AFTER
    failed_cap: int = FAILED_CAP
    trace: list[str] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    terminal: str | None = None
    ticks: int = 0

    def record_success(self, task: str) -> None:
        if task not in self.completed_tasks:
            self.completed_tasks.append(task)

    def record_failure(self, task: str) -> None:
        self.failed_tasks.append(task)
        del self.failed_tasks[:-self.failed_cap]

    def too_hard(self, task: str) -> bool:
        return self.failed_tasks.count(task) > self.too_hard_threshold


@dataclass
class ActResult:
    choice: ActorChoice | None
    outcome: SkillOutcome
    candidates: list[tuple[str, str]]
    skipped: bool = False


def _count(state: EpisodeState | None, role: str) -> None:
    if state is not None:
        state.role_calls[role] = state.role_calls.get(role, 0) + 1


def prompt_hash(messages) -> str:
    payload = json.dumps([m.to_dict() if isinstance(m, ChatMessage) else m for m in messages], sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def ask(backend, messages: list[ChatMessage], parse: Callable, role: str, state: EpisodeState | None = None,
        retry_on=(ParseFailed, FormatViolation)):
    """Call the backend and parse; on a parse error re-prompt once with the repair suffix."""
    _count(state, role)
    raw = backend.complete(messages)
    try:
        return parse(raw), raw
    except retry_on:
        repaired = list(messages[:-1]) + [user(f"{messages[-1].content}\n{REPAIR_SUFFIX}")]
        _count(state, role)
        raw = backend.complete(repaired)
        return parse(raw), raw


def task_quantity(task: str) -> int | None:
    m = _QUANTITY.search(task)
    return int(m.group(1)) if m and int(m.group(1)) > 0 else None


def _failed_outcome(world: WorldState, message: str) -> SkillOutcome:
    h = world.agent.holdings()
    return SkillOutcome(False, [message], dict(h), dict(h))


def act(subgoal: str, index: SkillIndex, library: SkillLibrary, world: WorldState, backend, k: int = DEFAULT_K,
        recursive: bool = True, state: EpisodeState | None = None, relevance_threshold: float | None = None,
        use_query_context: bool = True) -> ActResult:
    """Retrieve top-k skills, let the backend choose one, then run it."""
    if not subgoal or not subgoal.strip():
        raise ValueError("subgoal must be non-empty")
    query = subgoal
    if use_query_context:
        _count(state, "query")
        query = query_context(subgoal, backend)
    hits = query_top_k(index, query, min(k, len(index)))
    descriptions = dict(zip(index.names, index.descriptions))
    candidates = [(name, descriptions[name]) for name, _ in hits]
    if relevance_threshold is not None and hits[0][1] < relevance_threshold:
        return ActResult(None, _failed_outcome(world, f"No relevant skill for {subgoal}."), candidates, skipped=True)
    names = [c[0] for c in candidates]
    messages = skill_selection_messages(subgoal, candidates, state.last_program if state else None,
                                        state.last_critique if state else None)
    try:
        choice, _ = ask(backend, messages, lambda raw: parse_actor(raw, names), "actor", state,
                        retry_on=(ParseFailed, FormatViolation, ChoiceNotInCandidates))
    except AgentError as exc:
        return ActResult(None, _failed_outcome(world, f"{type(exc).__name__}: {exc}"), candidates)
    outcome = library.execute(choice.program, world, recursive=recursive, quantity=task_quantity(subgoal))
    return ActResult(choice, outcome, candidates)


def criticize(task: str, outcome: SkillOutcome, observation_before, observation_after, backend,
              state: EpisodeState | None = None) -> CriticVerdict:
    if observation_before is not None:
        before, used = dict(observation_before.inventory), observation_before.inventory_used
    else:
        before = dict(outcome.inventory_before)
        used = slots_used(before)
    messages = critic_messages(task, observation_after, before, used, outcome.log)
    verdict, _ = ask(backend, messages, parse_critic, "critic", state)
    return verdict


def rerank_combat_order(monsters, backend, state: EpisodeState | None = None) -> list[str]:
    monsters = list(monsters)
    if not monsters:
        raise ValueError("monster list is empty")
    if len(monsters) == 1:
        return monsters
    try:
        order, _ = ask(backend, combat_order_messages(monsters), lambda raw: parse_combat_order(raw, monsters),
                       "combat", state, retry_on=(ParseFailed, FormatViolation, NotAPermutation))
        return order
    except AgentError:
        return monsters


@dataclass
class EpisodeConfig:
    k: int = DEFAULT_K
    recursive: bool = True
    reference: str | None = None
    relevance_threshold: float | None = None
    ablation: bool = False
    use_query_context: bool = True
    log_path: str | Path | None = None


def _plan(mode: str, world: WorldState, state: EpisodeState, backend, cfg: EpisodeConfig):
    if mode == "LPT":
        messages = build_planner_prompt("LPT", None, state, state.goal)
    else:
        messages = build_planner_prompt(mode, sim.observe(world), state, state.goal, cfg.reference, cfg.ablation)
    parsed, raw = ask(backend, messages, lambda r: parse_planner(mode, r), "planner", state)
    return messages, parsed, raw


def run_episode(mode: str, goal, budget: int, world: WorldState, backend, index: SkillIndex, library: SkillLibrary,
                goal_predicate: Callable[[WorldState], bool] | None = None, config: EpisodeConfig | None = None,
                state: EpisodeState | None = None, on_cycle: Callable[[EpisodeState, WorldState], None] | None = None,
                task_id: str = "episode") -> tuple[EpisodeState, RunResult]:
    """Plan, act and criticize until the goal holds, the budget runs out or the agent dies.

    For LPT the planner is called once and its subgoals are popped one per cycle; the
    episode ends successfully once every subgoal has been attempted.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    cfg = config or EpisodeConfig()
    if mode not in ("LPT", "DPT", "AET"):
        raise ValueError(f"unknown mode {mode}")
    state = state or EpisodeState(mode=mode, goal=goal)
    state.mode, state.goal = mode, goal
    clock0 = world.clock
    queue: list[str] | None = None
    log_file = open(cfg.log_path, "a") if cfg.log_path else None
    try:
        while True:
            if goal_predicate is not None and goal_predicate(world):
                state.terminal = "success"
                break
            if not world.agent.alive:
                state.terminal = "agent_dead"
                break
            if mode == "LPT" and queue is not None and not queue:
                state.terminal = "success"
                break
            if state.llm_iters >= budget:
                state.terminal = "budget_exhausted"
                break
            record = {"cycle": state.llm_iters + 1, "prompt_hash": None, "raw_response": None, "parsed": None,
                      "skill": None, "outcome_success": False, "ticks": 0, "critique": None}
            try:
                if mode == "LPT":
                    if queue is None:
                        messages, parsed, raw = _plan(mode, world, state, backend, cfg)
                        state.last_plan = parsed
                        queue = list(parsed.subgoals)
                        record.update(prompt_hash=prompt_hash(messages), raw_response=raw)
                        if not queue:
                            continue
                    task = queue.pop(0)
                    record["parsed"] = task
                else:
                    messages, parsed, raw = _plan(mode, world, state, backend, cfg)
                    state.last_plan = parsed
                    task = parsed.task
                    record.update(prompt_hash=prompt_hash(messages), raw_response=raw, parsed=parsed.to_dict())
            except AgentError as exc:
                state.llm_iters += 1
                record["critique"] = f"{type(exc).__name__}: {exc}"
                state.last_critique = record["critique"]
                _emit(state, record, log_file)
                if on_cycle:
                    on_cycle(state, world)
                if mode == "LPT":
                    queue = []
                continue
            before = sim.observe(world)
            res = act(task, index, library, world, backend, cfg.k, cfg.recursive, state, cfg.relevance_threshold,
                      cfg.use_query_context)
            if res.skipped or res.choice is None:
                verdict = CriticVerdict("skipped", False, res.outcome.log[-1])
            else:
                try:
                    verdict = criticize(task, res.outcome, before, sim.observe(world), backend, state)
                except AgentError as exc:
                    verdict = CriticVerdict("unparseable critic reply", False, f"{type(exc).__name__}: {exc}")
            state.llm_iters += 1
            state.last_log = list(res.outcome.log)
            state.last_program = res.choice.program if res.choice else None
            state.last_critique = verdict.critique
            if res.outcome.success:
                state.trace.extend(res.outcome.skills_invoked)
            if verdict.success:
                state.record_success(task)
            else:
                state.record_failure(task)
            record.update(skill=state.last_program, outcome_success=verdict.success,
                          ticks=res.outcome.ticks_consumed, critique=verdict.critique)
            _emit(state, record, log_file)
            if on_cycle:
                on_cycle(state, world)
    finally:
        if log_file:
            log_file.close()
    state.ticks = world.clock - clock0
    result = RunResult(task_id, state.round, state.terminal == "success", state.ticks, state.llm_iters,
                       state.terminal, seed=world.seed)
    return state, result


def _emit(state: EpisodeState, record: dict, log_file) -> None:
    state.records.append(record)
    if log_file:
        log_file.write(json.dumps(record, sort_keys=True) + "\n")
