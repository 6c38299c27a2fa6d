"""Simulator operations. Every mutator takes the WorldState first and is deterministic."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import gen
from .errors import (
    AgentDead, ConfigError, InventoryFull, MissingFuel, MissingInputs, MissingStation, MissingTool,
    NoFood, NotFound, OutOfBounds, ToolTierTooLow, Unreachable, UnknownSpecies,
)
from .state import (
    ARMOR_SLOT_NAMES, AgentState, Entity, Inventory, Observation, Position,
    WorldConfig, WorldState,
)
from .tables import Tables, load_tables

__all__ = [
    "Outcome", "new_world", "block_at", "set_block", "tick", "observe", "time_of_day", "ticks_to_minutes",
    "find_nearest_block", "nearest_entity", "mine", "craft", "smelt", "attack", "kill", "goto",
    "find_suitable_position", "check_adjacent_block", "check_block_above", "check_blocks_around",
    "check_nearby_block", "check_no_adjacent_block", "get_animal", "plant_seeds", "hoe_farmland",
    "feed_animals", "breed", "shear_sheep", "milk_cow", "collect_water", "eat_food", "equip_best",
    "equip", "place_item", "toss_item", "deposit_item_into_chest", "get_item_from_chest",
    "check_item_inside_chest", "explore_until", "wait_ticks", "combat_env", "arena_shell_count",
    "summon_mob", "arm_hostiles", "respawn_and_clear", "respawn_after_death", "spawn_entity",
    "HOE_MISSING",
]

HOE_MISSING = "No hoe in inventory. Craft a hoe first!"
AGENT_REACH = 3.0
AGGRO_RADIUS = 16
NEIGHBOURS6 = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
NEIGHBOURS4 = ((1, 0, 0), (-1, 0, 0), (0, 0, 1), (0, 0, -1))
IMPLICIT_KINDS = ("grass_block", "dirt", "stone", "deepslate", "sand")


@dataclass
class Outcome:
    success: bool
    log: list[str] = field(default_factory=list)
    drops: dict[str, int] = field(default_factory=dict)
    ticks: int = 0
    data: dict = field(default_factory=dict)


def ticks_to_minutes(ticks: int) -> float:
    return ticks * 0.05 / 60


def time_of_day(clock: int) -> str:
    phase = clock % 24000
    if phase < 12000:
        return "day"
    if phase < 13800:
        return "sunset"
    if phase < 22200:
        return "night"
    return "sunrise"


# --------------------------------------------------------------------------- construction

def new_world(seed: int, config: WorldConfig | dict | None = None, tables: Tables | None = None) -> WorldState:
    if not isinstance(seed, int) or not -(2 ** 63) <= seed < 2 ** 64:
        raise ConfigError("seed must be a 64-bit integer")
    cfg = config if isinstance(config, WorldConfig) else WorldConfig.from_dict(config)
    tables = tables or load_tables()
    start = Position(*cfg.agent_start)
    if not _in_bounds(cfg, start):
        raise ConfigError(f"agent_start {start} outside bounds")
    agent = AgentState(position=start, inventory=Inventory(tables))
    world = WorldState(seed=seed, config=cfg, tables=tables, agent=agent, difficulty=cfg.difficulty)
    for pl in cfg.placements:
        kind = pl["block"]
        if kind not in tables.blocks:
            raise ConfigError(f"placement of unknown block {kind}")
        if "at" in pl:
            set_block(world, Position.parse(pl["at"]), kind)
        else:
            a, b = Position.parse(pl["from"]), Position.parse(pl["to"])
            for x in range(min(a.x, b.x), max(a.x, b.x) + 1):
                for y in range(min(a.y, b.y), max(a.y, b.y) + 1):
                    for z in range(min(a.z, b.z), max(a.z, b.z) + 1):
                        set_block(world, Position(x, y, z), kind)
    for ent in cfg.entities:
        spawn_entity(world, ent["species"], Position.parse(ent["at"]))
    _activate(world)
    _remember_nearby(world)
    return world


def _in_bounds(cfg: WorldConfig, p: Position) -> bool:
    bx, by, bz = cfg.bounds
    return 0 <= p.x < bx and 0 <= p.y < by and 0 <= p.z < bz


def _check_bounds(world: WorldState, p: Position) -> None:
    if not _in_bounds(world.config, p):
        raise OutOfBounds(f"Position {p.key()} is outside the world")


def spawn_entity(world: WorldState, species: str, pos: Position) -> int:
    if species not in world.tables.mobs:
        raise UnknownSpecies(f"Unknown species {species}")
    m = world.tables.mobs[species]
    eid = world.next_entity_id
    world.next_entity_id += 1
    world.entities[eid] = Entity(
        id=eid, species=species, position=pos, health=float(m["max_health"]),
        max_health=float(m["max_health"]), hostility=m["hostility"], damage=float(m["damage"]),
        ranged=bool(m["ranged"]), reach=float(m["reach"]), speed=int(m["speed"]),
    )
    return eid


def _activate(world: WorldState) -> None:
    """Spawn creatures for chunks that come within the activation radius."""
    cfg = world.config
    if cfg.generator == "flat":
        return
    a = world.agent.position
    acx, acz = gen.chunk_of(a.x, a.z)
    rad = cfg.activation_radius
    for cx in range(acx - rad, acx + rad + 1):
        for cz in range(acz - rad, acz + rad + 1):
            if (cx, cz) in world.activated_chunks:
                continue
            world.activated_chunks.add((cx, cz))
            for species, p in gen.chunk_entities(world.seed, cx, cz, cfg, world.tables):
                if world.arena and _inside_arena(world.arena, p):
                    continue
                if _in_bounds(cfg, p):
                    spawn_entity(world, species, p)


# --------------------------------------------------------------------------- blocks

def _biome(world: WorldState, x: int, z: int) -> str:
    if world.config.generator == "flat":
        return world.config.biome or "plains"
    cx, cz = gen.chunk_of(x, z)
    return gen.biome_at(world.seed, cx, cz, world.config.biome)


def block_at(world: WorldState, p: Position) -> str:
    k = world.blocks.get(p)
    if k is not None:
        return k
    if not _in_bounds(world.config, p):
        return "air"
    cx, cz = gen.chunk_of(p.x, p.z)
    k = gen.chunk_features(world.seed, cx, cz, world.config, world.tables).get(p)
    if k is not None:
        return k
    return gen.terrain_at(p.y, _biome(world, p.x, p.z), world.config.ground_y)


def set_block(world: WorldState, p: Position, kind: str) -> None:
    _check_bounds(world, p)
    world.blocks[p] = kind


def _solid(world: WorldState, kind: str) -> bool:
    return bool(world.tables.blocks.get(kind, {}).get("solid", False))


def _explicit_in_box(world: WorldState, lo: Position, hi: Position):
    """(position, kind) for generated and overridden blocks inside an axis-aligned box."""
    seen = set()
    for p, k in world.blocks.items():
        if lo.x <= p.x <= hi.x and lo.y <= p.y <= hi.y and lo.z <= p.z <= hi.z:
            seen.add(p)
            yield p, k
    cfg = world.config
    for cx in range(lo.x // 16, hi.x // 16 + 1):
        for cz in range(lo.z // 16, hi.z // 16 + 1):
            for p, k in gen.chunk_features(world.seed, cx, cz, cfg, world.tables).items():
                if p in seen:
                    continue
                if lo.x <= p.x <= hi.x and lo.y <= p.y <= hi.y and lo.z <= p.z <= hi.z:
                    yield p, k


def _nearby_kinds(world: WorldState, center: Position, r: int) -> list[str]:
    lo, hi = center.offset(-r, -r, -r), center.offset(r, r, r)
    explicit_per_y: dict[int, int] = {}
    kinds: set[str] = set()
    for p, k in _explicit_in_box(world, lo, hi):
        if _in_bounds(world.config, p):
            kinds.add(k)
            explicit_per_y[p.y] = explicit_per_y.get(p.y, 0) + 1
    side = 2 * r + 1
    # clip the slab to bounds so edge worlds count correctly
    bx, _, bz = world.config.bounds
    cols = (min(hi.x, bx - 1) - max(lo.x, 0) + 1) * (min(hi.z, bz - 1) - max(lo.z, 0) + 1)
    cols = min(cols, side * side)
    biome = _biome(world, center.x, center.z)
    for y in range(max(lo.y, 0), min(hi.y, world.config.bounds[1] - 1) + 1):
        if explicit_per_y.get(y, 0) < cols:
            kinds.add(gen.terrain_at(y, biome, world.config.ground_y))
    kinds.discard("air")
    return sorted(kinds)


def _remember_nearby(world: WorldState) -> None:
    cap = world.tables.constants["recently_seen_cap"]
    for k in _nearby_kinds(world, world.agent.position, world.config.observe_radius):
        if k in world.recently_seen_blocks:
            world.recently_seen_blocks.remove(k)
        world.recently_seen_blocks.append(k)
    del world.recently_seen_blocks[:-cap]


def find_nearest_block(world: WorldState, kinds, radius: int | None = None, where=None,
                       origin: Position | None = None) -> Position | None:
    """Nearest block of any of `kinds` (Euclidean; ties by lexicographic position)."""
    if isinstance(kinds, str):
        kinds = world.tables.expand(kinds) if kinds.startswith("#") else [kinds]
    kinds = set(kinds)
    o = origin or world.agent.position
    R = radius if radius is not None else world.config.search_radius
    best: tuple[int, Position] | None = None

    def consider(p: Position):
        nonlocal best
        if not _in_bounds(world.config, p):
            return
        d = o.dist2(p)
        if d > R * R:
            return
        if best is not None and (d, p) >= best:
            return
        if block_at(world, p) not in kinds:
            return
        if where is not None and not where(p):
            return
        best = (d, p)

    for p, k in world.blocks.items():
        if k in kinds:
            consider(p)
    cfg = world.config
    if cfg.generator != "flat":
        for cx in range((o.x - R) // 16, (o.x + R) // 16 + 1):
            for cz in range((o.z - R) // 16, (o.z + R) // 16 + 1):
                idx = gen.chunk_kind_index(world.seed, cx, cz, cfg, world.tables)
                for k in kinds:
                    for p in idx.get(k, ()):
                        consider(p)
    implicit = kinds.intersection(IMPLICIT_KINDS)
    if implicit:
        g = cfg.ground_y
        scan = min(4, R)
        for dx in range(-scan, scan + 1):
            for dz in range(-scan, scan + 1):
                x, z = o.x + dx, o.z + dz
                biome = _biome(world, x, z)
                ys = [y for y in range(1, g) if gen.terrain_at(y, biome, g) in implicit]
                ys.sort(key=lambda y: (abs(y - o.y), y))
                for y in ys:
                    p = Position(x, y, z)
                    if block_at(world, p) in implicit and (where is None or where(p)):
                        consider(p)
                        break
    return best[1] if best else None


# --------------------------------------------------------------------------- time

def _may_attack(world: WorldState, e: Entity) -> bool:
    if e.hostility == "passive" or e.damage <= 0:
        return False
    return e.provoked or (e.hostility == "hostile" and world.difficulty != "peaceful")


def _armed(world: WorldState, e: Entity) -> bool:
    """Provoked mobs always fight; natural hostiles only at night or inside an arena."""
    if not _may_attack(world, e):
        return False
    return e.provoked or world.arena is not None or time_of_day(world.clock) == "night"


def _inside_arena(arena: dict, p: Position) -> bool:
    r, h = arena["r"], arena["h"]
    return (abs(p.x - arena["cx"]) < r and abs(p.z - arena["cz"]) < r
            and arena["y"] < p.y < arena["y"] + h)


def _separated(world: WorldState, a: Position, b: Position) -> bool:
    if not world.arena:
        return False
    return _inside_arena(world.arena, a) != _inside_arena(world.arena, b)


def _dist(a: Position, b: Position) -> float:
    return math.sqrt(a.dist2(b))


def _hurt_agent(world: WorldState, dmg: float) -> None:
    red = world.tables.armor_reduction(world.agent.equipment.armor())
    world.agent.health = max(0.0, round(world.agent.health - dmg * (1 - red), 6))
    if world.agent.health <= 0:
        world.agent.alive = False
        world.deaths += 1


def _step_toward(e: Entity, target: Position, stop: float) -> None:
    for _ in range(e.speed):
        if _dist(e.position, target) <= stop:
            return
        p = e.position
        dx, dz = target.x - p.x, target.z - p.z
        if abs(dx) >= abs(dz) and dx:
            e.position = p.offset(dx=1 if dx > 0 else -1)
        elif dz:
            e.position = p.offset(dz=1 if dz > 0 else -1)
        elif target.y != p.y:
            e.position = p.offset(dy=1 if target.y > p.y else -1)


def tick(world: WorldState, n: int) -> WorldState:
    """Advance the clock by n ticks, applying hunger, combat and births."""
    if n < 0:
        raise ValueError("tick count must be non-negative")
    if n == 0:
        return world
    c = world.tables.constants
    start, end = world.clock, world.clock + n
    P, H, S = c["attack_period"], c["hunger_period"], c["starve_period"]
    a = world.agent
    events: set[int] = set()
    survival = world.difficulty != "peaceful"
    if a.alive:
        armed = [e for e in world.entities.values() if _may_attack(world, e)
                 and _dist(e.position, a.position) <= AGGRO_RADIUS
                 and not _separated(world, e.position, a.position)]
        if armed:
            events.update(range((start // P + 1) * P, end + 1, P))
        if survival:
            events.update(range((start // H + 1) * H, end + 1, H))
            events.update(range((start // S + 1) * S, end + 1, S))
    events.update(t for t, _, _ in world.pending_births if start < t <= end)
    for t in sorted(events):
        world.clock = t
        _births(world, t)
        if not a.alive:
            continue
        if survival and t % H == 0:
            a.hunger = max(0.0, a.hunger - 1)
        if survival and t % S == 0 and a.hunger <= 0:
            _hurt_agent(world, 1.0)
        if t % P == 0:
            for e in sorted(world.entities.values(), key=lambda e: e.id):
                if not a.alive:
                    break
                if not _armed(world, e) or _separated(world, e.position, a.position):
                    continue
                if _dist(e.position, a.position) > AGGRO_RADIUS:
                    continue
                _step_toward(e, a.position, min(e.reach, 1.0) if not e.ranged else e.reach)
                if _dist(e.position, a.position) <= e.reach:
                    _hurt_agent(world, e.damage)
    world.clock = end
    _births(world, end)
    return world


def _births(world: WorldState, now: int) -> None:
    due = [b for b in world.pending_births if b[0] <= now]
    if not due:
        return
    world.pending_births = [b for b in world.pending_births if b[0] > now]
    for _, species, pos in due:
        spawn_entity(world, species, pos)


def wait_ticks(world: WorldState, n: int) -> Outcome:
    tick(world, n)
    return Outcome(True, [f"Waited {n} ticks."], ticks=n)


# --------------------------------------------------------------------------- observation

def observe(world: WorldState) -> Observation:
    a = world.agent
    cfg = world.config
    nearby = _nearby_kinds(world, a.position, cfg.observe_radius)
    ents = sorted(
        (e for e in world.entities.values() if _dist(e.position, a.position) <= cfg.entity_radius),
        key=lambda e: (a.position.dist2(e.position), e.id),
    )
    chests = {p.key(): dict(sorted(c.items())) for p, c in sorted(world.chests.items())
              if _dist(p, a.position) <= cfg.observe_radius * 2}
    return Observation(
        biome=_biome(world, a.position.x, a.position.z),
        time_of_day=time_of_day(world.clock),
        nearby_blocks=nearby,
        recently_seen_blocks=[k for k in world.recently_seen_blocks if k not in nearby],
        nearby_entities=[e.species for e in ents],
        health=a.health,
        hunger=a.hunger,
        position=a.position,
        equipment=a.equipment.as_list(),
        inventory=a.inventory.counts(),
        inventory_used=a.inventory.used(),
        chests=chests or None,
    )


# --------------------------------------------------------------------------- movement

def _require_alive(world: WorldState) -> None:
    if not world.agent.alive:
        raise AgentDead("The agent is dead")


def _travel(world: WorldState, dest: Position) -> int:
    """Move the agent, charge path ticks, update stats. Returns ticks charged."""
    _check_bounds(world, dest)
    a = world.agent
    if _separated(world, a.position, dest):
        raise Unreachable(f"No path to {dest.key()}")
    steps = a.position.manhattan(dest)
    if steps == 0:
        return 0
    a.position = dest
    world.distance += steps
    _activate(world)
    _remember_nearby(world)
    cost = steps * world.tables.constants["path_ticks_per_block"]
    tick(world, cost)
    if world.distance >= 1000:
        world.events.add("travel_1000")
    return cost


def goto(world: WorldState, pos) -> Outcome:
    _require_alive(world)
    pos = Position.parse(pos)
    _check_bounds(world, pos)
    cost = _travel(world, pos)
    return Outcome(True, [f"Reached {pos.key()}."], ticks=cost)


def explore_until(world: WorldState, target: str, max_steps: int = 16, step: int = 32) -> Outcome:
    """Walk an outward square spiral until a block kind or species is within range."""
    _require_alive(world)

    def found() -> bool:
        if target in world.tables.mobs:
            return nearest_entity(world, target, radius=world.config.search_radius) is not None
        return find_nearest_block(world, target) is not None

    ticks = 0
    if found():
        return Outcome(True, [f"Found {target} nearby."])
    dirs = ((1, 0), (0, 1), (-1, 0), (0, -1))
    leg, d, moved = 1, 0, 0
    for _ in range(max_steps):
        dx, dz = dirs[d % 4]
        p = world.agent.position
        dest = Position(p.x + dx * step * leg, world.config.ground_y, p.z + dz * step * leg)
        if not _in_bounds(world.config, dest) or _separated(world, p, dest):
            d += 1
            continue
        ticks += _travel(world, dest)
        moved += 1
        if found():
            return Outcome(True, [f"Explored and found {target}."], ticks=ticks)
        d += 1
        if d % 2 == 0:
            leg += 1
    return Outcome(False, [f"Could not find {target} after exploring."], ticks=ticks)


# --------------------------------------------------------------------------- inventory helpers

def _gain(world: WorldState, items: dict[str, int]) -> None:
    for k, n in items.items():
        world.agent.inventory.add(k, n)
        if n > 0:
            world.held_ever.add(k)


def _sync_hand(world: WorldState) -> None:
    eq = world.agent.equipment
    inv = world.agent.inventory
    for slot in ("main_hand", "off_hand"):
        item = getattr(eq, slot)
        if item and inv.count(item) == 0:
            setattr(eq, slot, None)


def _spend(world: WorldState, items: dict[str, int]) -> None:
    for k, n in items.items():
        world.agent.inventory.remove(k, n)
    _sync_hand(world)


def _tagged_need(world: WorldState, inputs: dict[str, int], times: int) -> tuple[dict[str, int], dict[str, int]]:
    """Concrete items to consume for `times` crafts, plus any shortfall keyed by input key."""
    inv = world.agent.inventory
    plan: dict[str, int] = {}
    short: dict[str, int] = {}
    for key, per in inputs.items():
        need = per * times
        for kind in world.tables.expand(key):
            have = inv.count(kind) - plan.get(kind, 0)
            take = min(have, need)
            if take > 0:
                plan[kind] = plan.get(kind, 0) + take
                need -= take
        if need > 0:
            short[key.lstrip("#")] = need
    return plan, short


def _best_held(world: WorldState, cls: str) -> str | None:
    t = world.tables
    best = None
    for kind in world.agent.inventory.counts():
        if t.tool_class(kind) == cls:
            if best is None or (t.tier_rank(t.items[kind].tier), kind) > (t.tier_rank(t.items[best].tier), best):
                best = kind
    return best


# --------------------------------------------------------------------------- mining and crafting

def mine(world: WorldState, block_kind: str, where=None) -> Outcome:
    """Mine the nearest block of a kind (or '#tag' of kinds) and collect its drops."""
    _require_alive(world)
    t = world.tables
    kinds = t.expand(block_kind) if block_kind.startswith("#") else [block_kind]
    for k in kinds:
        if k not in t.blocks or "ticks" not in t.blocks[k]:
            raise NotFound(f"Cannot mine {k}")
    pos = find_nearest_block(world, kinds, where=where)
    if pos is None:
        raise NotFound(f"No {block_kind.lstrip('#')} found nearby")
    kind = block_at(world, pos)
    spec = t.blocks[kind]
    if spec.get("tier"):
        tool = _best_held(world, spec["tool"])
        need = t.tier_rank(spec["tier"])
        if tool is None or t.tier_rank(t.items[tool].tier) < need:
            raise ToolTierTooLow(f"Mining {kind} requires a {spec['tier']} {spec['tool']} or better")
        world.agent.equipment.main_hand = tool
    drops = dict(spec.get("drops", {}))
    if not world.agent.inventory.can_add(drops):
        raise InventoryFull(f"Inventory full, cannot collect {kind}")
    if _separated(world, world.agent.position, pos):
        raise Unreachable(f"No path to {kind}")
    ticks = _travel(world, pos)
    world.blocks[pos] = "air"
    _gain(world, drops)
    tick(world, spec["ticks"])
    ticks += spec["ticks"]
    desc = ", ".join(f"{n} {k}" for k, n in drops.items()) or "nothing"
    return Outcome(True, [f"Mined 1 {kind}, got {desc}."], drops=drops, ticks=ticks, data={"position": pos.key()})


def craft(world: WorldState, recipe_id: str, times: int = 1) -> Outcome:
    _require_alive(world)
    t = world.tables
    r = t.recipe(recipe_id)
    if r.is_smelting:
        return smelt(world, recipe_id, times)
    if times < 1:
        raise ValueError("times must be >= 1")
    inv = world.agent.inventory
    if r.station != "none" and inv.count(r.station) < 1:
        raise MissingStation(f"Cannot craft {recipe_id}: no {r.station} in inventory")
    plan, short = _tagged_need(world, r.inputs, times)
    if short:
        raise MissingInputs(short, recipe_id)
    out = {recipe_id: r.output_count * times}
    if not inv.can_add(out, removing=plan):
        raise InventoryFull(f"Inventory full, cannot craft {recipe_id}")
    _spend(world, plan)
    _gain(world, out)
    if r.station != "none":
        world.agent.equipment.main_hand = r.station
    world.items_crafted += out[recipe_id]
    world.recipes_crafted.add(recipe_id)
    cost = t.constants["craft_ticks"] * times
    tick(world, cost)
    return Outcome(True, [f"Crafted {out[recipe_id]} {recipe_id}."], drops=out, ticks=cost,
                   data={"consumed": plan})


def _smelting_recipe(t: Tables, recipe_id: str):
    if recipe_id in t.recipes and t.recipes[recipe_id].is_smelting:
        return t.recipes[recipe_id]
    for r in t.recipes.values():
        if r.is_smelting and recipe_id in r.inputs:
            return r
    return t.recipe(recipe_id)


def smelt(world: WorldState, recipe_id: str, count: int = 1) -> Outcome:
    """Smelt or cook `count` items; accepts the output id or the raw input id."""
    _require_alive(world)
    t = world.tables
    r = _smelting_recipe(t, recipe_id)
    if not r.is_smelting:
        raise MissingStation(f"{recipe_id} is not made in a furnace")
    if count < 1:
        raise ValueError("count must be >= 1")
    inv = world.agent.inventory
    if inv.count("furnace") < 1:
        raise MissingStation(f"Cannot smelt {r.output_id}: no furnace in inventory")
    plan, short = _tagged_need(world, r.inputs, count)
    if short:
        raise MissingInputs(short, r.output_id)
    per = t.constants["fuel_items_per_coal"]
    fuel = {k: v * math.ceil(count / per) for k, v in r.fuel.items()}
    missing_fuel = {k: v - inv.count(k) for k, v in fuel.items() if inv.count(k) < v}
    if missing_fuel:
        raise MissingFuel(f"Cannot smelt {r.output_id}: need {fuel} as fuel")
    spend = dict(plan)
    for k, v in fuel.items():
        spend[k] = spend.get(k, 0) + v
    out = {r.output_id: r.output_count * count}
    if not inv.can_add(out, removing=spend):
        raise InventoryFull(f"Inventory full, cannot smelt {r.output_id}")
    _spend(world, spend)
    _gain(world, out)
    world.agent.equipment.main_hand = "furnace"
    cost = t.constants["smelt_ticks"] * count
    tick(world, cost)
    return Outcome(True, [f"Smelted {out[r.output_id]} {r.output_id}."], drops=out, ticks=cost,
                   data={"consumed": spend})


# --------------------------------------------------------------------------- entities and combat

def nearest_entity(world: WorldState, species=None, hostility=None, radius: float | None = None,
                   origin: Position | None = None) -> Entity | None:
    o = origin or world.agent.position
    R = radius if radius is not None else world.config.search_radius
    if isinstance(species, str):
        species = {species}
    best = None
    for e in world.entities.values():
        if species is not None and e.species not in species:
            continue
        if hostility is not None and e.hostility != hostility:
            continue
        d = o.dist2(e.position)
        if d > R * R or _separated(world, o, e.position):
            continue
        if best is None or (d, e.id) < best[0]:
            best = ((d, e.id), e)
    return best[1] if best else None


def _approach(world: WorldState, e: Entity) -> int:
    a = world.agent.position
    if _dist(a, e.position) <= AGENT_REACH:
        return 0
    p = e.position
    dx, dz = a.x - p.x, a.z - p.z
    if abs(dx) >= abs(dz):
        dest = p.offset(dx=1 if dx > 0 else -1)
    else:
        dest = p.offset(dz=1 if dz > 0 else -1)
    dest = Position(dest.x, p.y, dest.z)
    if not _in_bounds(world.config, dest):
        dest = p
    return _travel(world, dest)


def attack(world: WorldState, entity_id: int) -> Outcome:
    """One strike at an entity (after pathing into reach), then one attack period passes."""
    _require_alive(world)
    e = world.entities.get(entity_id)
    if e is None:
        raise NotFound(f"No entity {entity_id}")
    ticks = _approach(world, e)
    if not world.agent.alive:
        raise AgentDead("The agent died while approaching")
    if entity_id not in world.entities:
        raise NotFound(f"No entity {entity_id}")
    dmg = world.tables.weapon_damage(world.agent.equipment.main_hand)
    e.health = max(0.0, e.health - dmg)
    if e.hostility == "neutral":
        e.provoked = True
    drops: dict[str, int] = {}
    log = [f"Hit {e.species} for {dmg:g} damage."]
    if e.health <= 0:
        del world.entities[entity_id]
        drops = dict(world.tables.mobs[e.species]["drops"])
        kept = {}
        for k, n in drops.items():
            room = min(n, world.agent.inventory.free_capacity(k))
            if room:
                kept[k] = room
        _gain(world, kept)
        drops = kept
        if e.hostility == "hostile":
            world.events.add("kill_hostile")
        log.append(f"Killed {e.species}.")
    P = world.tables.constants["attack_period"]
    tick(world, P)
    ticks += P
    return Outcome(True, log, drops=drops, ticks=ticks,
                   data={"damage_dealt": dmg, "target_health": e.health, "killed": e.health <= 0})


def kill(world: WorldState, entity_id: int, max_strikes: int = 200) -> Outcome:
    total = Outcome(True)
    for _ in range(max_strikes):
        if entity_id not in world.entities:
            break
        o = attack(world, entity_id)
        total.ticks += o.ticks
        for k, n in o.drops.items():
            total.drops[k] = total.drops.get(k, 0) + n
        total.log.extend(o.log[1:])
        if o.data["killed"]:
            break
    total.success = entity_id not in world.entities
    return total


# --------------------------------------------------------------------------- spatial checks

def _as_kinds(kinds) -> set[str]:
    return {kinds} if isinstance(kinds, str) else set(kinds)


def check_block_above(world: WorldState, kind: str, pos=None) -> bool:
    p = Position.parse(pos) if pos is not None else world.agent.position
    _check_bounds(world, p)
    return block_at(world, p.offset(dy=1)) == kind


def check_adjacent_block(world: WorldState, kinds, pos=None) -> bool:
    p = Position.parse(pos) if pos is not None else world.agent.position
    _check_bounds(world, p)
    ks = _as_kinds(kinds)
    return any(block_at(world, p.offset(*d)) in ks for d in NEIGHBOURS6)


def check_no_adjacent_block(world: WorldState, kinds, pos=None) -> bool:
    return not check_adjacent_block(world, kinds, pos)


def check_blocks_around(world: WorldState, kind: str, pos=None) -> bool:
    p = Position.parse(pos) if pos is not None else world.agent.position
    _check_bounds(world, p)
    return all(block_at(world, p.offset(*d)) == kind for d in NEIGHBOURS4)


def check_nearby_block(world: WorldState, kinds, pos=None, r: int = 4) -> bool:
    p = Position.parse(pos) if pos is not None else world.agent.position
    _check_bounds(world, p)
    return find_nearest_block(world, _as_kinds(kinds), radius=r, origin=p) is not None


def find_suitable_position(world: WorldState, near=None, r: int = 3) -> Position | None:
    """Nearest air block with at least one solid neighbour."""
    c = Position.parse(near) if near is not None else world.agent.position
    cands = []
    for dx in range(-r, r + 1):
        for dy in range(-r, r + 1):
            for dz in range(-r, r + 1):
                p = c.offset(dx, dy, dz)
                if _in_bounds(world.config, p):
                    cands.append((dx * dx + dy * dy + dz * dz, p))
    for _, p in sorted(cands):
        if p == world.agent.position:
            continue
        if block_at(world, p) != "air":
            continue
        if any(_solid(world, block_at(world, p.offset(*d))) for d in NEIGHBOURS6):
            return p
    return None


# --------------------------------------------------------------------------- farming and husbandry

def _animal_food(world: WorldState, species: str) -> str:
    m = world.tables.mobs.get(species)
    if m is None:
        raise UnknownSpecies(f"Unknown species {species}")
    if "food" not in m:
        raise NoFood(f"{species} cannot be fed")
    return m["food"]


def get_animal(world: WorldState, species: str, pos=None, exclude=()) -> Outcome:
    """Lure the nearest animal of a species (skipping ids in `exclude`) next to pos."""
    _require_alive(world)
    food = _animal_food(world, species)
    if world.agent.inventory.count(food) < 1:
        raise NoFood(f"No {food} in inventory to lure {species}")
    R = world.config.search_radius * 2
    cands = sorted((world.agent.position.dist2(e.position), e.id) for e in world.entities.values()
                   if e.species == species and e.id not in exclude
                   and world.agent.position.dist2(e.position) <= R * R)
    e = world.entities[cands[0][1]] if cands else None
    if e is None:
        raise NotFound(f"No {species} nearby")
    target = Position.parse(pos) if pos is not None else world.agent.position
    _check_bounds(world, target)
    dest = target.offset(dx=1)
    steps = e.position.manhattan(dest)
    e.position = dest
    cost = steps * world.tables.constants["path_ticks_per_block"]
    tick(world, cost)
    return Outcome(True, [f"Led a {species} to {dest.key()}."], ticks=cost, data={"entity": e.id})


def feed_animals(world: WorldState, species: str, count: int = 2) -> Outcome:
    _require_alive(world)
    food = _animal_food(world, species)
    inv = world.agent.inventory
    if inv.count(food) < 1:
        raise NoFood(f"No {food} in inventory to feed {species}")
    R = world.config.entity_radius
    animals = sorted((e for e in world.entities.values() if e.species == species and not e.fed
                      and _dist(e.position, world.agent.position) <= R),
                     key=lambda e: (world.agent.position.dist2(e.position), e.id))
    if not animals:
        raise NotFound(f"No hungry {species} nearby")
    fed = 0
    for e in animals[:count]:
        if inv.count(food) < 1:
            break
        _spend(world, {food: 1})
        e.fed = True
        fed += 1
    tick(world, 5 * fed)
    return Outcome(True, [f"Fed {fed} {species}."], ticks=5 * fed, data={"fed": fed})


def breed(world: WorldState, species: str) -> Outcome:
    _require_alive(world)
    R = world.config.entity_radius
    ready = sorted((e for e in world.entities.values() if e.species == species and e.fed
                    and _dist(e.position, world.agent.position) <= R), key=lambda e: e.id)
    if len(ready) < 2:
        raise NotFound(f"Need two fed {species} nearby to breed")
    for e in ready[:2]:
        e.fed = False
    delay = world.tables.constants["breed_delay"]
    world.pending_births.append((world.clock + delay, species, ready[0].position))
    tick(world, delay)
    world.events.add("breed")
    return Outcome(True, [f"Bred two {species}; a baby {species} was born."], ticks=delay)


def _require_item(world: WorldState, key: str, message: str) -> str:
    for kind in world.tables.expand(key):
        if world.agent.inventory.count(kind) > 0:
            return kind
    raise MissingTool(message)


def hoe_farmland(world: WorldState) -> Outcome:
    _require_alive(world)
    hoe = _require_item(world, "#hoes", HOE_MISSING)
    pos = find_nearest_block(world, ["grass_block", "dirt"],
                             where=lambda p: block_at(world, p.offset(dy=1)) == "air")
    if pos is None:
        raise NotFound("No dirt or grass nearby to hoe")
    world.agent.equipment.main_hand = hoe
    ticks = _travel(world, pos.offset(dy=1))
    world.blocks[pos] = "farmland"
    tick(world, 5)
    world.events.add("hoe")
    return Outcome(True, ["Hoed 1 farmland."], ticks=ticks + 5, data={"position": pos.key()})


def plant_seeds(world: WorldState, seed_type: str = "wheat_seeds") -> Outcome:
    _require_alive(world)
    crops = world.tables.raw["crops"]
    if seed_type not in crops:
        raise NotFound(f"{seed_type} cannot be planted")
    if world.agent.inventory.count(seed_type) < 1:
        raise MissingInputs({seed_type: 1}, "a planted crop")
    pos = find_nearest_block(world, ["farmland"], where=lambda p: block_at(world, p.offset(dy=1)) == "air")
    if pos is None:
        raise NotFound("No farmland nearby. Hoe farmland first!")
    ticks = _travel(world, pos.offset(dy=1)) if world.agent.position != pos.offset(dy=1) else 0
    _spend(world, {seed_type: 1})
    world.blocks[pos.offset(dy=1)] = crops[seed_type]
    tick(world, 5)
    world.events.add("plant")
    return Outcome(True, [f"Planted {seed_type}."], ticks=ticks + 5)


def shear_sheep(world: WorldState) -> Outcome:
    _require_alive(world)
    _require_item(world, "shears", "No shears in inventory. Craft shears first!")
    e = nearest_entity(world, "sheep")
    while e is not None and e.sheared:
        e = next((s for s in sorted(world.entities.values(), key=lambda s: (world.agent.position.dist2(s.position), s.id))
                  if s.species == "sheep" and not s.sheared
                  and _dist(s.position, world.agent.position) <= world.config.search_radius), None)
    if e is None:
        raise NotFound("No sheep nearby to shear")
    if not world.agent.inventory.can_add({"white_wool": 1}):
        raise InventoryFull("Inventory full, cannot collect wool")
    world.agent.equipment.main_hand = "shears"
    ticks = _approach(world, e)
    e.sheared = True
    _gain(world, {"white_wool": 1})
    tick(world, 5)
    world.events.add("shear")
    return Outcome(True, ["Sheared 1 sheep, got 1 white_wool."], drops={"white_wool": 1}, ticks=ticks + 5)


def milk_cow(world: WorldState) -> Outcome:
    _require_alive(world)
    _require_item(world, "bucket", "No bucket in inventory. Craft a bucket first!")
    e = nearest_entity(world, "cow")
    if e is None:
        raise NotFound("No cow nearby to milk")
    ticks = _approach(world, e)
    _spend(world, {"bucket": 1})
    _gain(world, {"milk_bucket": 1})
    tick(world, 5)
    return Outcome(True, ["Milked a cow, got 1 milk_bucket."], drops={"milk_bucket": 1}, ticks=ticks + 5)


def collect_water(world: WorldState) -> Outcome:
    _require_alive(world)
    _require_item(world, "bucket", "No bucket in inventory. Craft a bucket first!")
    pos = find_nearest_block(world, ["water"])
    if pos is None:
        raise NotFound("No water nearby")
    ticks = _travel(world, pos.offset(dy=1))
    _spend(world, {"bucket": 1})
    _gain(world, {"water_bucket": 1})
    tick(world, 5)
    return Outcome(True, ["Filled a bucket with water."], drops={"water_bucket": 1}, ticks=ticks + 5)


def eat_food(world: WorldState, food: str | None = None) -> Outcome:
    _require_alive(world)
    values = world.tables.raw["food_values"]
    inv = world.agent.inventory
    if food is None:
        held = [f for f in values if inv.count(f) > 0]
        if not held:
            raise NoFood("No food in inventory")
        food = max(held, key=lambda f: (values[f], f))
    if inv.count(food) < 1:
        raise NoFood(f"No {food} in inventory")
    if food not in values:
        raise NoFood(f"{food} is not edible")
    _spend(world, {food: 1})
    world.agent.hunger = min(world.tables.constants["max_hunger"], world.agent.hunger + values[food])
    tick(world, 32)
    return Outcome(True, [f"Ate 1 {food}."], ticks=32)


# --------------------------------------------------------------------------- equipment

def equip(world: WorldState, item: str) -> Outcome:
    _require_alive(world)
    t = world.tables
    inv = world.agent.inventory
    eq = world.agent.equipment
    if inv.count(item) < 1:
        raise MissingTool(f"No {item} in inventory")
    kind = t.items.get(item)
    if kind is not None and kind.category == "armor":
        slot = t.tool_class(item)
        old = getattr(eq, slot)
        inv.remove(item, 1)
        if old:
            inv.add(old, 1)
        setattr(eq, slot, item)
        _sync_hand(world)
        return Outcome(True, [f"Equipped {item}."])
    eq.main_hand = item
    return Outcome(True, [f"Equipped {item}."])


def equip_best(world: WorldState, slot_class: str) -> Outcome:
    """Equip the best held item of a class: sword, pickaxe, axe, hoe, shovel or armor."""
    t = world.tables
    if slot_class == "armor":
        eq = world.agent.equipment
        log = []
        for slot in ARMOR_SLOT_NAMES:
            best = _best_held(world, slot)
            cur = getattr(eq, slot)
            if best and (cur is None or t.tier_rank(t.items[best].tier) > t.tier_rank(t.items[cur].tier)):
                log.extend(equip(world, best).log)
        return Outcome(True, log or ["No better armor to equip."])
    best = _best_held(world, slot_class)
    if best is None:
        raise MissingTool(f"No {slot_class} in inventory")
    return equip(world, best)


# --------------------------------------------------------------------------- placing and chests

def place_item(world: WorldState, item: str, pos=None) -> Outcome:
    _require_alive(world)
    if world.agent.inventory.count(item) < 1:
        raise MissingInputs({item: 1}, f"placed {item}")
    if item not in world.tables.blocks:
        raise NotFound(f"{item} cannot be placed")
    p = Position.parse(pos) if pos is not None else find_suitable_position(world)
    if p is None:
        raise NotFound("No suitable position to place")
    _check_bounds(world, p)
    _spend(world, {item: 1})
    world.blocks[p] = item
    if item == "chest":
        world.chests[p] = {}
    tick(world, 5)
    return Outcome(True, [f"Placed {item} at {p.key()}."], ticks=5, data={"position": p.key()})


def toss_item(world: WorldState, item: str, count: int = 1) -> Outcome:
    _require_alive(world)
    _spend(world, {item: count})
    return Outcome(True, [f"Tossed {count} {item}."])


def _chest_at(world: WorldState, pos) -> tuple[Position, dict]:
    if pos is None:
        if not world.chests:
            raise NotFound("No chest nearby")
        p = min(world.chests, key=lambda c: (world.agent.position.dist2(c), c))
    else:
        p = Position.parse(pos)
    if p not in world.chests:
        raise NotFound(f"No chest at {p.key()}")
    return p, world.chests[p]


def deposit_item_into_chest(world: WorldState, item: str, count: int = 1, pos=None) -> Outcome:
    _require_alive(world)
    p, contents = _chest_at(world, pos)
    _spend(world, {item: count})
    contents[item] = contents.get(item, 0) + count
    return Outcome(True, [f"Deposited {count} {item} into chest at {p.key()}."])


def get_item_from_chest(world: WorldState, item: str, count: int = 1, pos=None) -> Outcome:
    _require_alive(world)
    p, contents = _chest_at(world, pos)
    if contents.get(item, 0) < count:
        raise MissingInputs({item: count - contents.get(item, 0)}, "chest withdrawal")
    if not world.agent.inventory.can_add({item: count}):
        raise InventoryFull("Inventory full")
    contents[item] -= count
    if contents[item] == 0:
        del contents[item]
    _gain(world, {item: count})
    return Outcome(True, [f"Took {count} {item} from chest at {p.key()}."])


def check_item_inside_chest(world: WorldState, pos=None) -> Outcome:
    p, contents = _chest_at(world, pos)
    return Outcome(True, [f"Chest at {p.key()} contains {dict(sorted(contents.items()))}."],
                   data={"contents": dict(contents)})


# --------------------------------------------------------------------------- benchmark scaffolding

def arena_shell_count(h: int, r: int) -> int:
    """Blocks in the hollow shell of an arena (closed form)."""
    return (2 * r + 1) ** 2 * (h + 1) - (2 * r - 1) ** 2 * (h - 1)


def combat_env(world: WorldState, h: int, r: int, y: int) -> WorldState:
    """Seal a hollow box (floor y, ceiling y+h, walls at ±r) around the agent; agent at the center."""
    if h <= 0 or r <= 0:
        raise ConfigError("arena height and half-side must be positive")
    cx, cz = world.agent.position.x, world.agent.position.z
    lo, hi = Position(cx - r, y, cz - r), Position(cx + r, y + h, cz + r)
    _check_bounds(world, lo)
    _check_bounds(world, hi)
    for x in range(lo.x, hi.x + 1):
        for yy in range(lo.y, hi.y + 1):
            for z in range(lo.z, hi.z + 1):
                shell = x in (lo.x, hi.x) or z in (lo.z, hi.z) or yy in (lo.y, hi.y)
                world.blocks[Position(x, yy, z)] = "bedrock" if shell else "air"
    world.arena = {"cx": cx, "cz": cz, "y": y, "h": h, "r": r}
    for eid in [e.id for e in world.entities.values() if lo.x <= e.position.x <= hi.x
                and lo.z <= e.position.z <= hi.z and lo.y <= e.position.y <= hi.y]:
        del world.entities[eid]
    world.agent.position = Position(cx, y + 1, cz)
    return world


def summon_mob(world: WorldState, n: int, r: int, species: str) -> list[int]:
    """Place n creatures with |dx| and |dz| in [r, 2r] from the agent."""
    if species not in world.tables.mobs:
        raise UnknownSpecies(f"Unknown species {species}")
    if n < 1 or r < 0:
        raise ConfigError("summon_mob needs n >= 1 and r >= 0")
    rng = world.rng(f"summon:{species}")
    a = world.agent.position
    ids = []
    for _ in range(n):
        dx = rng.randint(r, 2 * r) * rng.choice((-1, 1))
        dz = rng.randint(r, 2 * r) * rng.choice((-1, 1))
        p = Position(a.x + dx, a.y, a.z + dz)
        _check_bounds(world, p)
        ids.append(spawn_entity(world, species, p))
    return ids


def arm_hostiles(world: WorldState) -> None:
    world.difficulty = "normal"


def respawn_and_clear(world: WorldState) -> WorldState:
    """Teleport to a fresh surface spot, wipe items, restore vitals, set peaceful."""
    cfg = world.config
    if cfg.respawn_points:
        p = Position(*cfg.respawn_points[world.respawn_index % len(cfg.respawn_points)])
    else:
        rng = world.rng("respawn")
        m = 64
        p = Position(rng.randint(m, cfg.bounds[0] - m - 1), cfg.ground_y, rng.randint(m, cfg.bounds[2] - m - 1))
    world.respawn_index += 1
    a = world.agent
    a.position = p
    a.inventory.clear()
    a.equipment.clear()
    a.health = world.tables.constants["max_health"]
    a.hunger = world.tables.constants["max_hunger"]
    a.alive = True
    world.difficulty = "peaceful"
    _activate(world)
    _remember_nearby(world)
    return world


def respawn_after_death(world: WorldState) -> WorldState:
    """Revive within 32 blocks of where the agent fell, keeping items."""
    rng = world.rng("death")
    a = world.agent
    cfg = world.config
    while True:
        dx, dz = rng.randint(-32, 32), rng.randint(-32, 32)
        if dx * dx + dz * dz <= 32 * 32:
            break
    p = Position(min(max(a.position.x + dx, 0), cfg.bounds[0] - 1), cfg.ground_y,
                 min(max(a.position.z + dz, 0), cfg.bounds[2] - 1))
    a.position = p
    a.health = world.tables.constants["max_health"]
    a.hunger = world.tables.constants["max_hunger"]
    a.alive = True
    _activate(world)
    return world

