"""Terrain and chunk content as pure functions of (seed, chunk)."""
from __future__ import annotations

import random
from functools import lru_cache

from .state import Position, WorldConfig, derive_seed
from .tables import Tables

CHUNK = 16
REGION = 4  # chunks per biome region side
BIOME_WEIGHTS = (("plains", 3), ("forest", 3), ("birch_forest", 1), ("jungle", 1), ("desert", 1))
DEEPSLATE_DEPTH = 24  # blocks below ground_y where deepslate starts


def chunk_of(x: int, z: int) -> tuple[int, int]:
    return x // CHUNK, z // CHUNK


def biome_at(seed: int, cx: int, cz: int, forced: str | None) -> str:
    if forced:
        return forced
    r = random.Random(derive_seed(seed, "biome", cx // REGION, cz // REGION))
    names = [b for b, _ in BIOME_WEIGHTS]
    weights = [w for _, w in BIOME_WEIGHTS]
    return r.choices(names, weights)[0]


def terrain_at(y: int, biome: str, ground_y: int) -> str:
    """Implicit layered terrain below the agent's standing height."""
    if y >= ground_y:
        return "air"
    if y <= 0:
        return "bedrock"
    if biome == "desert" and y >= ground_y - 4:
        return "sand"
    if y == ground_y - 1:
        return "grass_block"
    if y >= ground_y - 4:
        return "dirt"
    if y <= ground_y - DEEPSLATE_DEPTH:
        return "deepslate"
    return "stone"


def _count(r: random.Random, expected: float) -> int:
    base = int(expected)
    return base + (1 if r.random() < expected - base else 0)


def _feature_key(seed: int, cfg: WorldConfig) -> tuple:
    return (seed, cfg.generator, cfg.biome, cfg.density, cfg.ground_y, cfg.bounds)


def chunk_features(seed: int, cx: int, cz: int, cfg: WorldConfig, tables: Tables) -> dict[Position, str]:
    """Generated blocks that differ from the implicit terrain in one chunk."""
    return _chunk_features(_feature_key(seed, cfg), cx, cz, tables)


@lru_cache(maxsize=4096)
def _chunk_features(key: tuple, cx: int, cz: int, tables: Tables) -> dict[Position, str]:
    seed, generator, forced, density, g, bounds = key
    if generator == "flat":
        return {}
    if not (0 <= cx * CHUNK < bounds[0] and 0 <= cz * CHUNK < bounds[2]):
        return {}
    biome = biome_at(seed, cx, cz, forced)
    spec = tables.biomes[biome]
    r = random.Random(derive_seed(seed, "chunk", cx, cz))
    ox, oz = cx * CHUNK, cz * CHUNK
    out: dict[Position, str] = {}

    def put(x, y, z, kind):
        p = Position(ox + x, y, oz + z)
        if p not in out:
            out[p] = kind

    # ponds first so plants avoid water
    if r.random() < spec["pond_chance"] * min(1.0, density):
        px, pz = r.randint(3, 12), r.randint(3, 12)
        for dx in (-1, 0, 1):
            for dz in (-1, 0, 1):
                put(px + dx, g - 1, pz + dz, "water")
        put(px + 2, g, pz, "sugar_cane")
        put(px + 2, g + 1, pz, "sugar_cane")
    used_columns: set[tuple[int, int]] = set()
    for kind in sorted(spec["features"]):
        for _ in range(_count(r, spec["features"][kind] * CHUNK * CHUNK * density)):
            lx, lz = r.randint(1, 14), r.randint(1, 14)
            if (lx, lz) in used_columns or Position(ox + lx, g - 1, oz + lz) in out:
                continue
            used_columns.add((lx, lz))
            if kind.endswith("_log"):
                leaves = kind.replace("_log", "_leaves")
                for h in range(3):
                    put(lx, g + h, lz, kind)
                put(lx, g + 3, lz, leaves)
                for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    put(lx + dx, g + 2, lz + dz, leaves)
            else:
                put(lx, g, lz, kind)
    for kind in sorted(tables.raw["underground"]):
        u = tables.raw["underground"][kind]
        for _ in range(_count(r, u["per_chunk"] * density)):
            depth = r.randint(u["min_depth"], u["max_depth"])
            put(r.randint(0, 15), g - 1 - depth, r.randint(0, 15), kind)
    return out


def chunk_kind_index(seed: int, cx: int, cz: int, cfg: WorldConfig, tables: Tables) -> dict[str, tuple[Position, ...]]:
    return _chunk_kind_index(_feature_key(seed, cfg), cx, cz, tables)


@lru_cache(maxsize=4096)
def _chunk_kind_index(key: tuple, cx: int, cz: int, tables: Tables) -> dict[str, tuple[Position, ...]]:
    idx: dict[str, list[Position]] = {}
    for p, k in _chunk_features(key, cx, cz, tables).items():
        idx.setdefault(k, []).append(p)
    return {k: tuple(sorted(v)) for k, v in idx.items()}


def chunk_entities(seed: int, cx: int, cz: int, cfg: WorldConfig, tables: Tables) -> list[tuple[str, Position]]:
    """Creatures that appear when a chunk is first activated."""
    if cfg.generator == "flat":
        return []
    if not (0 <= cx * CHUNK < cfg.bounds[0] and 0 <= cz * CHUNK < cfg.bounds[2]):
        return []
    biome = biome_at(seed, cx, cz, cfg.biome)
    spec = tables.biomes[biome]
    table = cfg.spawn_table if cfg.spawn_table is not None else {**spec["animals"], **spec["hostiles"]}
    r = random.Random(derive_seed(seed, "spawn", cx, cz))
    feats = chunk_features(seed, cx, cz, cfg, tables)
    out = []
    for species in sorted(table):
        if r.random() < table[species] * min(1.0, cfg.density):
            for _ in range(r.randint(2, 3)):
                p = Position(cx * CHUNK + r.randint(0, 15), cfg.ground_y, cz * CHUNK + r.randint(0, 15))
                if p in feats or Position(p.x, p.y - 1, p.z) in feats:
                    continue
                out.append((species, p))
    return out
