"""World state dataclasses and canonical snapshot serialization."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, fields
from typing import Any

from .errors import ConfigError, InventoryFull, MissingInputs
from .tables import Tables

ARMOR_SLOT_NAMES = ("helmet", "chestplate", "leggings", "boots")
EQUIP_SLOT_NAMES = ARMOR_SLOT_NAMES + ("main_hand", "off_hand")


@dataclass(frozen=True, order=True)
class Position:
    x: int
    y: int
    z: int

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def key(self) -> str:
        return f"{self.x},{self.y},{self.z}"

    @classmethod
    def parse(cls, value) -> "Position":
        if isinstance(value, Position):
            return value
        if isinstance(value, str):
            value = value.split(",")
        x, y, z = (int(v) for v in value)
        return cls(x, y, z)

    def offset(self, dx=0, dy=0, dz=0) -> "Position":
        return Position(self.x + dx, self.y + dy, self.z + dz)

    def manhattan(self, other: "Position") -> int:
        return abs(self.x - other.x) + abs(self.y - other.y) + abs(self.z - other.z)

    def dist2(self, other: "Position") -> int:
        return (self.x - other.x) ** 2 + (self.y - other.y) ** 2 + (self.z - other.z) ** 2


@dataclass
class ItemStack:
    kind: str
    count: int


class Inventory:
    """36 ordered slots of optional ItemStack."""

    CAPACITY = 36

    def __init__(self, tables: Tables, slots: list | None = None):
        self.tables = tables
        self.slots: list[ItemStack | None] = slots if slots is not None else [None] * self.CAPACITY

    def count(self, kind: str) -> int:
        return sum(s.count for s in self.slots if s is not None and s.kind == kind)

    def count_key(self, key: str) -> int:
        return sum(self.count(k) for k in self.tables.expand(key))

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for s in self.slots:
            if s is not None:
                out[s.kind] = out.get(s.kind, 0) + s.count
        return out

    def used(self) -> int:
        return sum(1 for s in self.slots if s is not None)

    def free_capacity(self, kind: str) -> int:
        size = self.tables.stack_size(kind)
        room = 0
        for s in self.slots:
            if s is None:
                room += size
            elif s.kind == kind:
                room += size - s.count
        return room

    def can_add(self, items: dict[str, int], removing: dict[str, int] | None = None) -> bool:
        trial = self.copy()
        try:
            for k, n in (removing or {}).items():
                trial.remove(k, n)
            for k, n in items.items():
                trial.add(k, n)
        except (InventoryFull, MissingInputs):
            return False
        return True

    def add(self, kind: str, n: int) -> None:
        if n <= 0:
            return
        if self.free_capacity(kind) < n:
            raise InventoryFull(f"Inventory full, cannot hold {n} {kind}")
        size = self.tables.stack_size(kind)
        for s in self.slots:
            if n and s is not None and s.kind == kind and s.count < size:
                take = min(n, size - s.count)
                s.count += take
                n -= take
        for i, s in enumerate(self.slots):
            if n and s is None:
                take = min(n, size)
                self.slots[i] = ItemStack(kind, take)
                n -= take

    def remove(self, kind: str, n: int) -> None:
        if n <= 0:
            return
        have = self.count(kind)
        if have < n:
            raise MissingInputs({kind: n - have})
        for i in range(len(self.slots) - 1, -1, -1):
            s = self.slots[i]
            if n and s is not None and s.kind == kind:
                take = min(n, s.count)
                s.count -= take
                n -= take
                if s.count == 0:
                    self.slots[i] = None

    def clear(self) -> None:
        self.slots = [None] * self.CAPACITY

    def copy(self) -> "Inventory":
        return Inventory(self.tables, [ItemStack(s.kind, s.count) if s else None for s in self.slots])

    def to_list(self) -> list:
        return [[s.kind, s.count] if s else None for s in self.slots]


@dataclass
class EquipmentSet:
    helmet: str | None = None
    chestplate: str | None = None
    leggings: str | None = None
    boots: str | None = None
    main_hand: str | None = None
    off_hand: str | None = None

    def as_list(self) -> list[str | None]:
        return [getattr(self, n) for n in EQUIP_SLOT_NAMES]

    def armor(self) -> list[str]:
        return [a for a in (self.helmet, self.chestplate, self.leggings, self.boots) if a]

    def clear(self) -> None:
        for n in EQUIP_SLOT_NAMES:
            setattr(self, n, None)


@dataclass
class Entity:
    id: int
    species: str
    position: Position
    health: float
    max_health: float
    hostility: str
    damage: float
    ranged: bool = False
    reach: float = 1.5
    speed: int = 0
    provoked: bool = False
    fed: bool = False
    sheared: bool = False

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["position"] = self.position.key()
        return d


@dataclass
class AgentState:
    position: Position
    health: float = 20.0
    hunger: float = 20.0
    inventory: Inventory | None = None
    equipment: EquipmentSet = field(default_factory=EquipmentSet)
    alive: bool = True

    def holdings(self) -> dict[str, int]:
        """Inventory counts plus worn armor (what prerequisite predicates see)."""
        out = self.inventory.counts()
        for a in self.equipment.armor():
            out[a] = out.get(a, 0) + 1
        return out


@dataclass
class Observation:
    biome: str
    time_of_day: str
    nearby_blocks: list[str]
    recently_seen_blocks: list[str]
    nearby_entities: list[str]
    health: float
    hunger: float
    position: Position
    equipment: list[str | None]
    inventory: dict[str, int]
    inventory_used: int
    chests: dict[str, dict[str, int]] | None = None

    @property
    def inventory_summary(self) -> str:
        return f"{self.inventory_used}/36"

    def holdings(self) -> dict[str, int]:
        out = dict(self.inventory)
        for a in self.equipment[:4]:
            if a:
                out[a] = out.get(a, 0) + 1
        return out


_CONFIG_KEYS = {
    "bounds", "generator", "biome", "ground_y", "agent_start", "search_radius", "observe_radius",
    "entity_radius", "density", "spawn_table", "placements", "entities", "respawn_points",
    "difficulty", "activation_radius", "name", "description",
}


@dataclass
class WorldConfig:
    bounds: tuple[int, int, int] = (1024, 256, 1024)
    generator: str = "procedural"
    biome: str | None = None
    ground_y: int = 64
    agent_start: tuple[int, int, int] | None = None
    search_radius: int = 48
    observe_radius: int = 8
    entity_radius: int = 16
    density: float = 1.0
    spawn_table: dict[str, float] | None = None
    placements: list[dict] = field(default_factory=list)
    entities: list[dict] = field(default_factory=list)
    respawn_points: list[tuple[int, int, int]] = field(default_factory=list)
    difficulty: str = "normal"
    activation_radius: int = 2
    name: str = "default"
    description: str = ""

    def __post_init__(self):
        self.bounds = tuple(int(b) for b in self.bounds)
        if len(self.bounds) != 3 or any(b <= 0 for b in self.bounds):
            raise ConfigError(f"bounds must be three positive sizes, got {self.bounds}")
        if self.generator not in ("procedural", "flat"):
            raise ConfigError(f"unknown generator {self.generator}")
        if not 1 <= self.ground_y < self.bounds[1] - 8:
            raise ConfigError("ground_y outside bounds")
        if self.spawn_table is not None and not self.spawn_table:
            raise ConfigError("spawn_table is empty")
        if self.density < 0:
            raise ConfigError("density must be non-negative")
        if self.difficulty not in ("peaceful", "easy", "normal", "hard"):
            raise ConfigError(f"unknown difficulty {self.difficulty}")
        if self.agent_start is None:
            self.agent_start = (self.bounds[0] // 2, self.ground_y, self.bounds[2] // 2)
        self.agent_start = tuple(int(v) for v in self.agent_start)
        self.respawn_points = [tuple(int(v) for v in p) for p in self.respawn_points]

    @classmethod
    def from_dict(cls, d: dict[str, Any] | None) -> "WorldConfig":
        d = dict(d or {})
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown world config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def derive_seed(*parts) -> int:
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


@dataclass
class WorldState:
    seed: int
    config: WorldConfig
    tables: Tables
    agent: AgentState
    clock: int = 0
    blocks: dict[Position, str] = field(default_factory=dict)
    entities: dict[int, Entity] = field(default_factory=dict)
    next_entity_id: int = 1
    recently_seen_blocks: list[str] = field(default_factory=list)
    rng_counter: int = 0
    difficulty: str = "normal"
    activated_chunks: set[tuple[int, int]] = field(default_factory=set)
    chests: dict[Position, dict[str, int]] = field(default_factory=dict)
    arena: dict | None = None
    pending_births: list[tuple[int, str, Position]] = field(default_factory=list)
    deaths: int = 0
    respawn_index: int = 0
    # statistics used by the benchmark metrics
    distance: int = 0
    items_crafted: int = 0
    recipes_crafted: set[str] = field(default_factory=set)
    events: set[str] = field(default_factory=set)
    held_ever: set[str] = field(default_factory=set)

    def rng(self, tag: str) -> random.Random:
        """Fresh generator for one event; reproducible from (seed, tag, counter)."""
        self.rng_counter += 1
        return random.Random(derive_seed(self.seed, tag, self.rng_counter))

    def to_dict(self) -> dict:
        inv = self.agent.inventory
        return {
            "seed": self.seed,
            "clock": self.clock,
            "config": self.config.to_dict(),
            "blocks": {p.key(): k for p, k in self.blocks.items()},
            "entities": {str(i): e.to_dict() for i, e in self.entities.items()},
            "next_entity_id": self.next_entity_id,
            "agent": {
                "position": self.agent.position.key(),
                "health": self.agent.health,
                "hunger": self.agent.hunger,
                "alive": self.agent.alive,
                "inventory": inv.to_list(),
                "equipment": self.agent.equipment.as_list(),
            },
            "recently_seen_blocks": list(self.recently_seen_blocks),
            "rng_counter": self.rng_counter,
            "difficulty": self.difficulty,
            "activated_chunks": sorted(f"{a},{b}" for a, b in self.activated_chunks),
            "chests": {p.key(): dict(c) for p, c in self.chests.items()},
            "arena": self.arena,
            "pending_births": [[t, s, p.key()] for t, s, p in self.pending_births],
            "deaths": self.deaths,
            "respawn_index": self.respawn_index,
            "distance": self.distance,
            "items_crafted": self.items_crafted,
            "recipes_crafted": sorted(self.recipes_crafted),
            "events": sorted(self.events),
            "held_ever": sorted(self.held_ever),
        }

    def snapshot(self) -> str:
        """Canonical JSON (sorted keys) for byte-identical replay checks."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
