"""Benchmark task declarations."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..world.errors import ConfigError
from ..world.tables import Tables, load_tables

KINDS = ("LPT_single", "LPT_multi", "DPT", "AET")
_MONSTER = re.compile(r"^\s*(\d+)\s+([a-z_ ]+?)\s*$")


@dataclass(frozen=True)
class MonsterEntry:
    count: int
    species: str

    def label(self) -> str:
        return f"{self.count} {self.species}"


def parse_monsters(text, tables: Tables | None = None) -> list[MonsterEntry]:
    """'1 zombie, 3 skeletons' (or a list of such strings) into entries of known species."""
    tables = tables or load_tables()
    parts = text.split(",") if isinstance(text, str) else list(text)
    out = []
    for part in parts:
        m = _MONSTER.match(part.lower())
        if not m:
            raise ConfigError(f"monster entry {part!r} is not 'quantity species'")
        n, name = int(m.group(1)), "_".join(m.group(2).split())
        species = name if name in tables.mobs else name[:-1] if name.endswith("s") and name[:-1] in tables.mobs else None
        if species is None or n < 1:
            raise ConfigError(f"unknown monster {part.strip()!r}")
        out.append(MonsterEntry(n, species))
    if not out:
        raise ConfigError("empty monster list")
    return out


@dataclass
class TaskSpec:
    id: str
    kind: str
    scenario: dict = field(default_factory=dict)
    repetitions: int = 1
    seed_base: int = 0

    def __post_init__(self):
        from .predicates import DPT_PREDICATES

        if self.kind not in KINDS:
            raise ConfigError(f"task {self.id}: unknown kind {self.kind}")
        if self.repetitions < 1:
            raise ConfigError(f"task {self.id}: repetitions must be >= 1")
        if self.kind.startswith("LPT"):
            parse_monsters(self.scenario.get("monsters", ""))
        elif self.kind == "DPT":
            if self.scenario.get("goal") not in DPT_PREDICATES:
                raise ConfigError(f"task {self.id}: no predicate registered for {self.scenario.get('goal')!r}")
        elif int(self.scenario.get("budget", 80)) < 1:
            raise ConfigError(f"task {self.id}: budget must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "TaskSpec":
        return cls(d["id"], d["kind"], dict(d.get("scenario", {})), int(d.get("repetitions", 1)),
                   int(d.get("seed_base", 0)))

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "scenario": self.scenario, "repetitions": self.repetitions,
                "seed_base": self.seed_base}


def load_suite(path: str | Path | None = None) -> list[TaskSpec]:
    """Read a task suite file; default is the bundled suite."""
    if path is None:
        from importlib import resources
        text = resources.files("craftagent.data").joinpath("suites", "default.json").read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    if doc.get("schema_version") != 1:
        raise ConfigError(f"unsupported suite schema_version {doc.get('schema_version')!r}")
    specs = [TaskSpec.from_dict(t) for t in doc["tasks"]]
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate task ids in suite")
    return specs
