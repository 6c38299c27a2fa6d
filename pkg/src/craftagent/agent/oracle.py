"""Scripted oracle: a deterministic rule-based stand-in for every LLM role."""
from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from ..skills.library import SkillLibrary
from .messages import ChatMessage
from .parsing import LPT_MATERIALS, first_balanced_span

ARMOR_PIECES = ("helmet", "chestplate", "leggings", "boots")
SUCCESS_VERBS = (
    "Mined", "Crafted", "Smelted", "Killed", "Fed", "Bred", "Hoed", "Planted", "Sheared", "Milked",
    "Filled", "Ate", "Equipped", "Placed", "Deposited", "Took", "No better armor",
)
_ROLE_MARKERS = (
    ("lpt", "defeat all monsters while using the shortest time"),
    ("combat", "generates the order of fighting monsters"),
    ("aet", "My ultimate goal is to discover as many diverse things as possible"),
    ("dpt", "My ultimate goal is to \""),
    ("actor", "decides Mineflayer javascript code"),
    ("critic", "evaluate if I have met the task requirements"),
    ("query", "answer my question about Minecraft"),
)


@lru_cache(maxsize=1)
def default_script() -> dict:
    return json.loads(resources.files("craftagent.data").joinpath("scripts", "oracle.json").read_text())


def _content(m) -> str:
    return m.content if isinstance(m, ChatMessage) else m["content"]


def _fields(text: str) -> dict[str, str]:
    """'Key: value' lines of a user message (first occurrence wins)."""
    out: dict[str, str] = {}
    for line in text.splitlines():
        if ": " in line:
            k, v = line.split(": ", 1)
            out.setdefault(k.strip(), v.strip())
        elif line.endswith(":"):
            out.setdefault(line[:-1].strip(), "")
    return out


def _field(fields: dict[str, str], prefix: str) -> str:
    for k, v in fields.items():
        if k.startswith(prefix):
            return v
    return "None"


def _literal(text: str, default):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return default


def _list_field(value: str) -> list[str]:
    return [] if value in ("", "None") else [v.strip() for v in value.split(",") if v.strip()]


def _norm(token: str) -> str:
    token = token.lower()
    return token[:-1] if len(token) > 3 and token.endswith("s") else token


def _words(text: str) -> list[str]:
    return [_norm(t) for t in re.findall(r"[A-Za-z]+", text)]


def _camel(name: str) -> list[str]:
    return [_norm(t) for t in re.findall(r"[A-Z]?[a-z]+", name)]


def task_phrase(lib: SkillLibrary, skill: str, quantity: int | None = None) -> str:
    """The task phrase a planner would propose for a skill, with a count when it is not the default."""
    phrase = lib.get(skill).description.split(":", 1)[0]
    spec = lib.get(skill)
    if quantity is None or quantity == spec.default_quantity:
        return phrase
    verb, _, rest = phrase.partition(" ")
    return f"{verb} {quantity} {rest}"


@dataclass
class OracleBackend:
    library: SkillLibrary
    script: dict = field(default_factory=default_script)
    aet_tasks: list[str] | None = None
    calls: dict[str, int] = field(default_factory=dict)

    def complete(self, messages, temperature: float | None = None, max_tokens: int | None = None) -> str:
        msgs = list(messages)
        sys_text = _content(msgs[0]) if msgs else ""
        user_text = _content(msgs[-1]) if msgs else ""
        role = next((r for r, marker in _ROLE_MARKERS if marker in sys_text), "unknown")
        self.calls[role] = self.calls.get(role, 0) + 1
        handler = getattr(self, f"_{role}", None)
        if handler is None:
            return '{"reasoning": "unrecognised prompt", "task": "Mine log"}'
        return handler(user_text, sys_text)

    # -- planners ------------------------------------------------------------------
    def _lpt(self, user_text: str, _sys: str) -> str:
        f = _fields(user_text)
        critique = f.get("Critique", "None")
        if critique == "None":
            return json.dumps(self.script["lpt_first_plan"])
        span = first_balanced_span(critique)
        prev = _literal(span, []) if span else []
        prev = [p for p in prev if isinstance(p, str)] or list(self.script["lpt_first_plan"])
        swords = [p for p in prev if p.endswith("sword")]
        armor = [p for p in prev if p.rsplit(" ", 1)[-1] in ARMOR_PIECES]
        if "victory" in critique.lower():
            if armor:
                plan = swords or ["craft wooden sword"]
            else:
                plan = ["craft wooden sword"]
        else:
            plan = list(swords) or ["craft iron sword"]
            if not armor:
                plan += [f"craft iron {a}" for a in ARMOR_PIECES]
            else:
                mat = plan[0].split()[1]
                i = LPT_MATERIALS.index(mat) if mat in LPT_MATERIALS else 0
                plan[0] = f"craft {LPT_MATERIALS[min(i + 1, 3)]} sword"
                plan += armor
        return json.dumps(plan)

    def _dpt(self, user_text: str, _sys: str) -> str:
        f = _fields(user_text)
        goal = f.get("Ultimate goal", "")
        targets = self.script["dpt_targets"].get(goal)
        if not targets:
            return json.dumps({"reasoning": f"No plan known for {goal}.", "task": goal})
        holdings = _literal(_field(f, "Inventory ("), {}) or {}
        nearby = _list_field(f.get("Nearby entities (nearest to farthest)", "None"))
        best = None
        for i, t in enumerate(targets):
            plan = self.library.resolve_plan(t, holdings)
            animal = next((s.skill[4:].lower() for s in plan if s.skill.startswith("kill")), None)
            rank = nearby.index(animal) if animal in nearby else len(nearby)
            key = (len(plan), rank, i)
            if best is None or key < best[0]:
                best = (key, plan)
        step = best[1][0]
        task = task_phrase(self.library, step.skill, step.quantity)
        return json.dumps({"reasoning": f"Next prerequisite towards {goal}.", "task": task})

    def _aet(self, user_text: str, _sys: str) -> str:
        f = _fields(user_text)
        done = set(_list_field(f.get("Completed tasks so far", "None")))
        failed = _list_field(f.get("Failed tasks that are too hard", "None"))
        hard = {t[: -len(" (too hard)")] for t in failed if t.endswith(" (too hard)")}
        tasks = self.aet_tasks if self.aet_tasks is not None else self.script["aet_curriculum"]
        for t in tasks:
            if t not in done and t not in hard:
                return json.dumps({"reasoning": "Next new thing to try.", "task": t})
        return json.dumps({"reasoning": "Everything on my list is done.", "task": tasks[-1] if tasks else "Mine log"})

    # -- actor, critic, helpers ------------------------------------------------------------
    def _actor(self, user_text: str, _sys: str) -> str:
        lines = user_text.splitlines()
        task = lines[0].split(": ", 1)[1] if lines and ": " in lines[0] else ""
        start = lines.index("Programs:") + 1 if "Programs:" in lines else 1
        names = []
        for line in lines[start:]:
            if line.startswith("Program used in the last round:"):
                break
            names.append(line.split(":", 1)[0])
        want = set(_words(task))
        best = max(range(len(names)), key=lambda i: (len(want & set(_camel(names[i]))),
                                                   -len(set(_camel(names[i])) - want), -i)) if names else None
        program = names[best] if best is not None else ""
        return json.dumps({"program": program, "reason": f"{program} matches the task {task!r}."})

    def _critic(self, user_text: str, _sys: str) -> str:
        f = _fields(user_text)
        verdict = judge(
            task=f.get("Task", ""),
            inventory_before=_literal(_field(f, "Last Inventory"), {}) or {},
            inventory_after=_literal(_field(f, "Current Inventory"), {}) or {},
            equipment=_literal(f.get("Equipment", "[]"), []) or [],
            nearby_blocks=_list_field(f.get("Nearby blocks", "None")),
            chat_log=f.get("Chat log", "None"),
            crop_blocks=tuple(self.library.tables.raw.get("crops", {}).values()),
        )
        return json.dumps(verdict)

    def _combat(self, user_text: str, _sys: str) -> str:
        monsters = _literal(user_text.strip(), None)
        if not isinstance(monsters, list):
            return user_text
        mobs = self.library.tables.mobs

        def key(i: int):
            species = str(monsters[i]).split(" ", 1)[-1].strip()
            m = mobs.get(species) or mobs.get(species[:-1]) or {}
            return (not m.get("ranged", False), -float(m.get("damage", 0.0)), i)

        return json.dumps([monsters[i] for i in sorted(range(len(monsters)), key=key)])

    def _query(self, user_text: str, _sys: str) -> str:
        return "Answer: Unknown"


def judge(task: str, inventory_before: dict, inventory_after: dict, equipment: list, nearby_blocks: list,
          chat_log: str, crop_blocks=("wheat", "melon_stem", "pumpkin_stem")) -> dict:
    """Rule-based critic verdict."""
    words = task.lower().split()
    verb = words[0] if words else ""
    obj = [w for w in words[1:] if not w.isdigit()]
    if verb == "craft":
        target = "_".join(obj)
        held = set(inventory_after) | {e for e in equipment if e}
        singular = target[:-1] if target.endswith("s") else target
        ok = any(k in (target, singular) or k.endswith("_" + target) or k.endswith("_" + singular) for k in held)
        critique = "" if ok else f"{target} is not in your inventory or equipment; gather its materials and craft it again."
        reason = f"Checked inventory and equipment for {target}."
    elif verb in ("mine", "collect", "kill"):
        gained = [k for k, n in inventory_after.items() if n > inventory_before.get(k, 0)]
        ok = bool(gained)
        critique = "" if ok else f"No item count increased after {task}; find the target nearby and use the right tool."
        reason = f"Items that increased: {gained or 'none'}."
    elif verb == "hoe":
        ok = "farmland" in nearby_blocks
        critique = "" if ok else "No farmland nearby; craft a hoe and use it on grass or dirt."
        reason = "Looked for farmland in nearby blocks."
    elif verb == "plant":
        ok = any(b in crop_blocks for b in nearby_blocks)
        critique = "" if ok else "No planted crop nearby; hoe farmland first and plant seeds on it."
        reason = "Looked for a planted crop in nearby blocks."
    else:
        sentences = [s for s in re.split(r"(?<=[.!])\s+", chat_log.strip()) if s] if chat_log != "None" else []
        last = sentences[-1] if sentences else ""
        ok = last.startswith(SUCCESS_VERBS)
        critique = "" if ok else f"The task did not finish: {last or 'no log'}"
        reason = "Judged from the final chat log line."
    return {"reasoning": reason, "success": ok, "critique": critique}
