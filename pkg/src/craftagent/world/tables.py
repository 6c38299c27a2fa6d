"""Versioned game tables: items, tags, blocks, recipes, mobs, damage and spawn data."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import ConfigError, UnknownRecipe

SCHEMA_VERSION = 1
CATEGORIES = {"block", "tool", "weapon", "armor", "food", "material", "seed", "bucket_like"}
TIERED = {"tool", "weapon", "armor"}
TIERS = ("wooden", "stone", "iron", "diamond")
ARMOR_SLOTS = ("helmet", "chestplate", "leggings", "boots")


@dataclass(frozen=True)
class ItemKind:
    id: str
    category: str
    tier: str | None = None
    stack: int = 64


@dataclass(frozen=True)
class Recipe:
    output_id: str
    output_count: int
    inputs: dict[str, int]
    station: str = "none"
    fuel: dict[str, int] | None = None

    @property
    def is_smelting(self) -> bool:
        return self.station == "furnace"


@dataclass(eq=False)
class Tables:
    raw: dict[str, Any]
    items: dict[str, ItemKind] = field(default_factory=dict)
    recipes: dict[str, Recipe] = field(default_factory=dict)

    def __post_init__(self):
        raw = self.raw
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported tables schema_version {raw.get('schema_version')!r}")
        for iid, spec in raw["items"].items():
            cat = spec["category"]
            if cat not in CATEGORIES:
                raise ConfigError(f"item {iid}: unknown category {cat}")
            tier = spec.get("tier")
            if (tier is not None) != (cat in TIERED):
                raise ConfigError(f"item {iid}: tier must be present iff category is tiered")
            default_stack = 1 if cat in TIERED else raw["constants"]["default_stack"]
            self.items[iid] = ItemKind(iid, cat, tier, spec.get("stack", default_stack))
        for out, spec in raw["recipes"].items():
            if not spec["inputs"]:
                raise ConfigError(f"recipe {out}: empty inputs")
            if spec["station"] == "furnace" and not spec.get("fuel"):
                raise ConfigError(f"recipe {out}: furnace recipe needs fuel")
            self.recipes[out] = Recipe(out, spec["output"], dict(spec["inputs"]), spec["station"],
                                       dict(spec["fuel"]) if spec.get("fuel") else None)
        for key in ("blocks", "mobs", "tags", "biomes"):
            if not raw.get(key):
                raise ConfigError(f"tables: empty {key}")

    # -- lookups -------------------------------------------------------------
    @property
    def constants(self) -> dict[str, Any]:
        return self.raw["constants"]

    @property
    def tags(self) -> dict[str, list[str]]:
        return self.raw["tags"]

    @property
    def blocks(self) -> dict[str, dict]:
        return self.raw["blocks"]

    @property
    def mobs(self) -> dict[str, dict]:
        return self.raw["mobs"]

    @property
    def biomes(self) -> dict[str, dict]:
        return self.raw["biomes"]

    @property
    def milestones(self) -> list[dict]:
        return self.raw["milestones"]

    def expand(self, key: str) -> list[str]:
        """Item ids matched by an item id or a '#tag'."""
        if key.startswith("#"):
            return list(self.tags[key])
        return [key]

    def recipe(self, output_id: str) -> Recipe:
        try:
            return self.recipes[output_id]
        except KeyError:
            raise UnknownRecipe(f"No recipe for {output_id}") from None

    def item(self, iid: str) -> ItemKind:
        if iid not in self.items:
            raise ConfigError(f"unknown item {iid}")
        return self.items[iid]

    def stack_size(self, iid: str) -> int:
        it = self.items.get(iid)
        return it.stack if it else self.constants["default_stack"]

    def tier_rank(self, tier: str | None) -> int:
        return -1 if tier is None else TIERS.index(tier)

    def tool_class(self, iid: str) -> str | None:
        """'pickaxe', 'axe', 'sword', 'helmet', ... for tiered items."""
        it = self.items.get(iid)
        if it is None or it.tier is None:
            return None
        return iid.rsplit("_", 1)[-1] if iid != "shears" else "shears"

    def weapon_damage(self, iid: str | None) -> float:
        it = self.items.get(iid) if iid else None
        if it is None or it.category != "weapon":
            return float(self.raw["weapon_damage"]["none"])
        return float(self.raw["weapon_damage"][it.tier])

    def armor_reduction(self, pieces) -> float:
        red = self.raw["armor_reduction"]
        return min(0.8, sum(red.get(p, 0.0) for p in pieces if p))


def _resolve_path(path: str | Path | None) -> Path | None:
    return Path(path) if path is not None else None


@lru_cache(maxsize=8)
def _load_cached(path: str | None) -> Tables:
    if path is None:
        text = resources.files("craftagent.data").joinpath("tables.json").read_text()
    else:
        text = Path(path).read_text()
    return Tables(json.loads(text))


def load_tables(path: str | Path | None = None) -> Tables:
    """Load (and cache) a tables fixture; default is the bundled one."""
    p = _resolve_path(path)
    return _load_cached(str(p) if p else None)
