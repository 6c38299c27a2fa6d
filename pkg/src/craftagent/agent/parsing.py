"""Strict response parsers for the planner, actor, critic and combat-order contracts."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any

from .errors import ChoiceNotInCandidates, FormatViolation, NotAPermutation, ParseFailed

LPT_MATERIALS = ("wooden", "stone", "iron", "diamond")
LPT_EQUIPMENT = ("sword", "helmet", "chestplate", "leggings", "boots")
REPAIR_SUFFIX = "Respond with valid JSON only."
MODES = ("LPT", "DPT", "AET")

_FENCE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\n?(.*?)```", re.S)
_LPT_SUBGOAL = re.compile(r"^craft (\S+) (\S+)$")


@dataclass(frozen=True)
class PlannerOutput:
    mode: str
    subgoals: tuple[str, ...] = ()
    reasoning: str = ""
    task: str = ""

    def to_dict(self) -> dict:
        if self.mode == "LPT":
            return {"subgoals": list(self.subgoals)}
        return {"reasoning": self.reasoning, "task": self.task}


@dataclass(frozen=True)
class ActorChoice:
    program: str
    reason: str = ""


@dataclass(frozen=True)
class CriticVerdict:
    reasoning: str
    success: bool
    critique: str

    def to_dict(self) -> dict:
        return {"reasoning": self.reasoning, "success": self.success, "critique": self.critique}


def strip_fences(text: str) -> str:
    """Contents of the first markdown code fence, or the text itself."""
    m = _FENCE.search(text)
    return m.group(1) if m else text


def first_balanced_span(text: str) -> str | None:
    """The first complete [...] or {...} span, respecting JSON string literals."""
    start = next((i for i, c in enumerate(text) if c in "[{"), None)
    if start is None:
        return None
    stack: list[str] = []
    in_str = esc = False
    for i in range(start, len(text)):
        c = text[i]
        if in_str:
            if esc:
                esc = False
            elif c == "\\":
                esc = True
            elif c == '"':
                in_str = False
            continue
        if c == '"':
            in_str = True
        elif c in "[{":
            stack.append("]" if c == "[" else "}")
        elif c in "]}":
            if not stack or stack.pop() != c:
                return None
            if not stack:
                return text[start:i + 1]
    return None


def _reject_constant(name: str):
    raise ValueError(f"non-standard JSON constant {name}")


def _strict_loads(text: str) -> Any:
    return json.loads(text, parse_constant=_reject_constant)


def load_json(raw: str) -> Any:
    """Strict JSON after fence stripping, falling back to the first balanced span."""
    if raw is None or not raw.strip():
        raise ParseFailed("empty response")
    text = strip_fences(raw).strip()
    try:
        return _strict_loads(text)
    except ValueError:
        pass
    span = first_balanced_span(text)
    if span is not None:
        try:
            return _strict_loads(span)
        except ValueError as exc:
            raise ParseFailed(f"invalid JSON: {exc}") from None
    raise ParseFailed("no JSON value found in response")


def _require_str(d: dict, key: str, allow_empty: bool = True) -> str:
    v = d.get(key)
    if not isinstance(v, str):
        raise FormatViolation(f'field "{key}" must be a string')
    if not allow_empty and not v.strip():
        raise FormatViolation(f'field "{key}" is empty')
    return v


def parse_planner(mode: str, raw: str) -> PlannerOutput:
    if mode not in MODES:
        raise ValueError(f"unknown planner mode {mode}")
    data = load_json(raw)
    if mode == "LPT":
        if not isinstance(data, list) or not all(isinstance(s, str) for s in data):
            raise FormatViolation("LPT plan must be a list of strings")
        subgoals = []
        for s in data:
            norm = " ".join(s.split()).lower()
            m = _LPT_SUBGOAL.match(norm)
            if not m or m.group(1) not in LPT_MATERIALS or m.group(2) not in LPT_EQUIPMENT:
                raise FormatViolation(f'subgoal "{s}" is not "craft [material] [equipment]"')
            subgoals.append(norm)
        return PlannerOutput(mode, tuple(subgoals))
    if not isinstance(data, dict):
        raise FormatViolation("planner reply must be a JSON object")
    reasoning = _require_str(data, "reasoning")
    task = _require_str(data, "task", allow_empty=False).strip()
    if "\n" in task:
        raise FormatViolation("task must be a single phrase")
    return PlannerOutput(mode, reasoning=reasoning, task=task)


def parse_actor(raw: str, candidates) -> ActorChoice:
    data = load_json(raw)
    if not isinstance(data, dict):
        raise FormatViolation("skill selection reply must be a JSON object")
    program = _require_str(data, "program", allow_empty=False)
    reason = data.get("reason", "")
    if not isinstance(reason, str):
        raise FormatViolation('field "reason" must be a string')
    if program not in list(candidates):
        raise ChoiceNotInCandidates(f"{program} is not one of the offered programs")
    return ActorChoice(program, reason)


def parse_critic(raw: str) -> CriticVerdict:
    data = load_json(raw)
    if not isinstance(data, dict):
        raise FormatViolation("critic reply must be a JSON object")
    success = data.get("success")
    if not isinstance(success, bool):
        raise FormatViolation('field "success" must be a boolean')
    reasoning = _require_str(data, "reasoning")
    critique = data.get("critique", "")
    if not isinstance(critique, str):
        raise FormatViolation('field "critique" must be a string')
    if not success and not critique.strip():
        raise FormatViolation("a failed verdict needs a critique")
    return CriticVerdict(reasoning, success, critique)


def parse_combat_order(raw: str, monsters) -> list[str]:
    data = load_json(raw)
    if not isinstance(data, list) or not all(isinstance(s, str) for s in data):
        raise FormatViolation("combat order must be a list of strings")
    if sorted(data) != sorted(monsters):
        raise NotAPermutation("combat order is not a permutation of the monster list")
    return list(data)
