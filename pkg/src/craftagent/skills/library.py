"""Skill registry with quantity-aware recursive prerequisite resolution."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from ..world import Observation, WorldState
from ..world.errors import WorldError
from ..world.tables import Tables, load_tables
from .errors import CycleDetected, DanglingRemedy, DuplicateName, InvalidSkill, UnknownSkill
from .ops import OPS, run_op

KINDS = ("primitive", "compositional")
FAMILIES = (
    "mineX", "craftX", "smeltX", "collectX", "makeX", "cookX", "plantX", "breedX", "killX", "placeX",
    "special", "operational_primitive", "spatial_primitive",
)
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Prerequisite:
    """Predicate "holds >= required(item)"; `remedy` runs when it fails."""

    item: str
    count: int
    mode: str  # "consume" scales with quantity, "hold" is a fixed threshold
    remedy: str
    per: int | None = None
    or_better: bool = False
    message: str | None = None

    def required(self, quantity: int) -> int:
        if self.mode == "hold":
            return self.count
        return self.count * math.ceil(quantity / (self.per or 1))

    def describe(self, quantity: int = 1) -> str:
        suffix = " or better" if self.or_better else ""
        return f"has item {self.item}{suffix} >= {self.required(quantity)}"

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"item": self.item, "count": self.count, "mode": self.mode, "remedy": self.remedy}
        if self.per is not None:
            d["per"] = self.per
        if self.or_better:
            d["or_better"] = True
        if self.message:
            d["message"] = self.message
        return d


@dataclass(frozen=True)
class SkillSpec:
    name: str
    kind: str
    family: str
    description: str
    prerequisites: tuple[Prerequisite, ...] = ()
    body: tuple[dict, ...] = ()
    product: str | None = None
    default_quantity: int = 1

    def __post_init__(self):
        if not self.name:
            raise InvalidSkill("skill name is empty")
        if self.kind not in KINDS:
            raise InvalidSkill(f"{self.name}: unknown kind {self.kind}")
        if self.family not in FAMILIES:
            raise InvalidSkill(f"{self.name}: unknown family {self.family}")
        if not self.description.strip():
            raise InvalidSkill(f"{self.name}: empty description")
        if not self.body:
            raise InvalidSkill(f"{self.name}: empty body")
        if self.kind == "primitive" and (self.prerequisites or len(self.body) != 1):
            raise InvalidSkill(f"{self.name}: primitives have no prerequisites and a single-op body")
        for op in self.body:
            if op.get("op") not in OPS:
                raise InvalidSkill(f"{self.name}: unknown primitive op {op.get('op')}")
        for p in self.prerequisites:
            if p.mode not in ("consume", "hold") or p.count < 1:
                raise InvalidSkill(f"{self.name}: bad prerequisite {p}")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SkillSpec":
        return cls(
            name=d["name"], kind=d["kind"], family=d["family"], description=d["description"],
            prerequisites=tuple(Prerequisite(**p) for p in d.get("prerequisites", [])),
            body=tuple(d["body"]), product=d.get("product"),
            default_quantity=d.get("default_quantity", 1),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name, "kind": self.kind, "family": self.family, "description": self.description,
            "product": self.product, "default_quantity": self.default_quantity,
            "prerequisites": [p.to_dict() for p in self.prerequisites], "body": list(self.body),
        }


@dataclass
class SkillOutcome:
    success: bool
    log: list[str] = field(default_factory=list)
    inventory_before: dict[str, int] = field(default_factory=dict)
    inventory_after: dict[str, int] = field(default_factory=dict)
    ticks_consumed: int = 0
    skills_invoked: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class PlanStep:
    skill: str
    quantity: int


def _holdings(state) -> dict[str, int]:
    if isinstance(state, WorldState):
        return state.agent.holdings()
    if isinstance(state, Observation):
        return state.holdings()
    return dict(state or {})


class SkillLibrary:
    """Ordered registry; registration order breaks ties between sibling prerequisites."""

    def __init__(self, tables: Tables | None = None):
        self.tables = tables or load_tables()
        self._skills: dict[str, SkillSpec] = {}
        self._order: dict[str, int] = {}

    # -- registration ------------------------------------------------------
    def register(self, spec: SkillSpec) -> SkillSpec:
        self.register_all([spec])
        return spec

    def register_all(self, specs) -> None:
        """Register a batch; remedies may point anywhere inside the batch or the registry."""
        specs = list(specs)
        names = set(self._skills)
        for s in specs:
            if s.name in names:
                raise DuplicateName(f"Skill {s.name} is already registered")
            names.add(s.name)
        for s in specs:
            for p in s.prerequisites:
                if p.remedy not in names:
                    raise DanglingRemedy(f"{s.name}: remedy {p.remedy} is not a registered skill")
        for s in specs:
            self._order[s.name] = len(self._skills)
            self._skills[s.name] = s

    def __contains__(self, name: str) -> bool:
        return name in self._skills

    def __len__(self) -> int:
        return len(self._skills)

    def get(self, name: str) -> SkillSpec:
        try:
            return self._skills[name]
        except KeyError:
            raise UnknownSkill(f"Unknown skill {name}") from None

    def names(self, kind: str | None = None) -> list[str]:
        return [n for n, s in self._skills.items() if kind is None or s.kind == kind]

    def descriptions(self, kind: str | None = None) -> list[tuple[str, str]]:
        return [(n, s.description) for n, s in self._skills.items() if kind is None or s.kind == kind]

    # -- serialization -----------------------------------------------------
    @classmethod
    def from_json(cls, text: str, tables: Tables | None = None) -> "SkillLibrary":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise InvalidSkill(f"unsupported skills schema_version {doc.get('schema_version')!r}")
        lib = cls(tables)
        lib.register_all(SkillSpec.from_dict(d) for d in doc["skills"])
        return lib

    def to_json(self) -> str:
        doc = {"schema_version": SCHEMA_VERSION, "skills": [s.to_dict() for s in self._skills.values()]}
        return json.dumps(doc, indent=1) + "\n"

    # -- predicates --------------------------------------------------------
    def held(self, holdings: Mapping[str, int], p: Prerequisite) -> int:
        t = self.tables
        if p.or_better:
            cls_ = t.tool_class(p.item)
            rank = t.tier_rank(t.items[p.item].tier)
            return sum(n for k, n in holdings.items()
                       if t.tool_class(k) == cls_ and t.tier_rank(t.items[k].tier) >= rank)
        return sum(holdings.get(k, 0) for k in t.expand(p.item))

    def unmet(self, name: str, state, quantity: int | None = None) -> list[Prerequisite]:
        spec = self.get(name)
        q = quantity or spec.default_quantity
        h = _holdings(state)
        return [p for p in spec.prerequisites if self.held(h, p) < p.required(q)]

    # -- resolution --------------------------------------------------------
    def check_acyclic(self, root: str) -> list[str]:
        """Nodes reachable from root through remedies, in DFS discovery order."""
        self.get(root)
        colour: dict[str, int] = {}
        order: list[str] = []
        stack: list[str] = []

        def visit(n: str) -> None:
            colour[n] = 1
            stack.append(n)
            order.append(n)
            for r in self._remedies(n):
                c = colour.get(r, 0)
                if c == 1:
                    raise CycleDetected(stack[stack.index(r):] + [r])
                if c == 0:
                    visit(r)
            stack.pop()
            colour[n] = 2

        visit(root)
        return order

    def _remedies(self, name: str) -> list[str]:
        rs = {p.remedy for p in self.get(name).prerequisites}
        return sorted(rs, key=self._order.__getitem__)

    def resolve_plan(self, name: str, state=None, quantity: int | None = None) -> list[PlanStep]:
        """Ordered (skill, quantity) steps: unmet prerequisites first, `name` last."""
        nodes = self.check_acyclic(name)
        holdings = _holdings(state)
        # consumers before producers, ties by registration order
        indeg = {n: 0 for n in nodes}
        for n in nodes:
            for r in self._remedies(n):
                indeg[r] += 1
        ready = sorted((n for n in nodes if indeg[n] == 0), key=self._order.__getitem__)
        topo: list[str] = []
        while ready:
            n = ready.pop(0)
            topo.append(n)
            for r in self._remedies(n):
                indeg[r] -= 1
                if indeg[r] == 0:
                    ready.append(r)
                    ready.sort(key=self._order.__getitem__)
        qty: dict[str, int] = {name: quantity or self.get(name).default_quantity}
        consumers: dict[str, list[tuple[str, Prerequisite]]] = {}
        for n in nodes:
            for p in self.get(n).prerequisites:
                consumers.setdefault(p.remedy, []).append((n, p))
        for n in topo:
            if n == name:
                continue
            demand = 0
            by_key: dict[tuple[str, bool], list[tuple[str, Prerequisite]]] = {}
            for c, p in consumers.get(n, []):
                if c in qty:
                    by_key.setdefault((p.item, p.or_better), []).append((c, p))
            for (item, _), uses in by_key.items():
                consumed = sum(p.required(qty[c]) for c, p in uses if p.mode == "consume")
                hold = max((p.required(qty[c]) for c, p in uses if p.mode == "hold"), default=0)
                shortfall = consumed + hold - self.held(holdings, uses[0][1])
                demand = max(demand, shortfall)
            if demand > 0:
                qty[n] = demand
        plan: list[PlanStep] = []
        seen: set[str] = set()

        def emit(n: str) -> None:
            seen.add(n)
            for r in self._remedies(n):
                if r in qty and r not in seen:
                    emit(r)
            plan.append(PlanStep(n, qty[n]))

        emit(name)
        return plan

    def resolve(self, name: str, state=None, quantity: int | None = None) -> list[str]:
        return [s.skill for s in self.resolve_plan(name, state, quantity)]

    # -- execution ---------------------------------------------------------
    def execute(self, name: str, world: WorldState, recursive: bool = True, quantity: int | None = None,
                args: dict | None = None) -> SkillOutcome:
        """Resolve then run each step; failures are reported in the outcome, never raised."""
        before = world.agent.holdings()
        clock0 = world.clock
        out = SkillOutcome(False, inventory_before=before)
        try:
            if recursive:
                plan = self.resolve_plan(name, world, quantity)
            else:
                spec = self.get(name)
                plan = [PlanStep(name, quantity or spec.default_quantity)]
        except Exception as exc:  # unknown skill or cycle: report, do not raise
            out.log.append(str(exc))
            out.inventory_after = world.agent.holdings()
            return out
        ok = True
        for step in plan:
            out.skills_invoked.append(step.skill)
            if not self._run_step(step, world, out, args if step.skill == name else None):
                ok = False
                break
        out.success = ok
        out.inventory_after = world.agent.holdings()
        out.ticks_consumed = world.clock - clock0
        return out

    def _run_step(self, step: PlanStep, world: WorldState, out: SkillOutcome, args: dict | None) -> bool:
        spec = self.get(step.skill)
        holdings = world.agent.holdings()
        for p in spec.prerequisites:
            have = self.held(holdings, p)
            need = p.required(step.quantity)
            if have < need:
                out.log.append(p.message or f"Cannot run {spec.name}: need {need} {p.item.lstrip('#')}, have {have}.")
                return False
        for op in spec.body:
            op_args = self._bind(op.get("args"), step.quantity, args)
            try:
                res = run_op(world, op["op"], op_args)
            except WorldError as exc:
                out.log.append(str(exc))
                return False
            except TypeError as exc:
                out.log.append(f"Bad arguments for {op['op']}: {exc}")
                return False
            out.log.extend(res.log)
            if not res.success:
                return False
        return True

    @staticmethod
    def _bind(raw, quantity: int, args: dict | None):
        if raw == "$args":
            return dict(args or {})
        if raw is None:
            return {}
        return {k: (quantity if v == "$q" else v) for k, v in raw.items()}


def load_library(path: str | Path | None = None, tables: Tables | None = None) -> SkillLibrary:
    """Load the bundled skill fixture (or a custom one)."""
    if path is None:
        text = resources.files("craftagent.data").joinpath("skills.json").read_text()
    else:
        text = Path(path).read_text()
    return SkillLibrary.from_json(text, tables)
