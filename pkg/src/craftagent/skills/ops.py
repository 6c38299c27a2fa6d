"""Bindings from the 40 primitive skill names to simulator operations."""
from __future__ import annotations

import math

from .. import world as w
from ..world import Outcome, WorldState
from ..world.errors import MissingTool, NotFound


def _kinds(block) -> list[str]:
    return [block] if isinstance(block, str) else list(block)


def _merge(total: Outcome, part: Outcome) -> None:
    total.log.extend(part.log)
    total.ticks += part.ticks
    for k, n in part.drops.items():
        total.drops[k] = total.drops.get(k, 0) + n


def explore_until(world: WorldState, target: str, max_steps: int = 16) -> Outcome:
    return w.explore_until(world, target, max_steps=max_steps)


def mine_block(world: WorldState, block, count: int = 1) -> Outcome:
    """Mine `count` blocks of a kind, a '#tag', or a list of kinds; explore when none is in range."""
    t = world.tables
    kinds: list[str] = []
    for k in _kinds(block):
        kinds.extend(t.expand(k))
    total = Outcome(True)
    for _ in range(count):
        pos = w.find_nearest_block(world, kinds)
        if pos is None:
            _merge(total, w.explore_until(world, kinds[0]) if len(kinds) == 1 else _explore_any(world, kinds))
            pos = w.find_nearest_block(world, kinds)
        if pos is None:
            raise NotFound(f"No {_label(block)} found nearby")
        _merge(total, w.mine(world, w.block_at(world, pos)))
    return total


def _label(block) -> str:
    return " or ".join(k.lstrip("#") for k in _kinds(block))


def _explore_any(world: WorldState, kinds: list[str]) -> Outcome:
    for k in kinds:
        o = w.explore_until(world, k)
        if o.success:
            return o
    return Outcome(False, [f"Could not find {' or '.join(kinds)} after exploring."])


def _plank_recipe(world: WorldState) -> str:
    t = world.tables
    inv = world.agent.inventory
    for planks in t.tags["#planks"]:
        r = t.recipes.get(planks)
        if r and any(inv.count_key(k) > 0 for k in r.inputs):
            return planks
    return t.tags["#planks"][0]


def craft_item(world: WorldState, item: str, count: int = 1) -> Outcome:
    recipe_id = _plank_recipe(world) if item == "#planks" else item
    r = world.tables.recipe(recipe_id)
    if r.is_smelting:
        return w.smelt(world, recipe_id, count)
    return w.craft(world, recipe_id, math.ceil(count / r.output_count))


def smelt_item(world: WorldState, item: str, count: int = 1) -> Outcome:
    return w.smelt(world, item, count)


def place_item(world: WorldState, item: str, pos=None) -> Outcome:
    return w.place_item(world, item, pos)


def kill_mob(world: WorldState, species: str, count: int = 1) -> Outcome:
    total = Outcome(True)
    for _ in range(count):
        e = w.nearest_entity(world, species)
        if e is None:
            _merge(total, w.explore_until(world, species))
            e = w.nearest_entity(world, species)
        if e is None:
            raise NotFound(f"No {species} found nearby")
        part = w.kill(world, e.id)
        _merge(total, part)
        if not part.success:
            total.success = False
            total.log.append(f"Failed to kill {species}.")
            break
    return total


def kill_monsters(world: WorldState, count: int = 1) -> Outcome:
    total = Outcome(True)
    for _ in range(count):
        e = w.nearest_entity(world, hostility="hostile")
        if e is None:
            if not total.log:
                raise NotFound("No hostile monsters nearby")
            break
        _merge(total, w.kill(world, e.id))
    return total


def get_item_from_chest(world: WorldState, item: str, count: int = 1, pos=None) -> Outcome:
    return w.get_item_from_chest(world, item, count, pos)


def deposit_item_into_chest(world: WorldState, item: str, count: int = 1, pos=None) -> Outcome:
    return w.deposit_item_into_chest(world, item, count, pos)


def check_item_inside_chest(world: WorldState, pos=None) -> Outcome:
    return w.check_item_inside_chest(world, pos)


def equip_item(world: WorldState, item: str) -> Outcome:
    return w.equip(world, item)


def consume_item(world: WorldState, item: str) -> Outcome:
    return w.eat_food(world, item)


def toss_item(world: WorldState, item: str, count: int = 1) -> Outcome:
    return w.toss_item(world, item, count)


def wait_ticks(world: WorldState, ticks: int) -> Outcome:
    return w.wait_ticks(world, ticks)


def use_hoe(world: WorldState, unless_nearby: str | None = None) -> Outcome:
    if unless_nearby and w.find_nearest_block(world, [unless_nearby], where=lambda p: w.block_at(world, p.offset(dy=1)) == "air"):
        return Outcome(True, [f"Found {unless_nearby} nearby."])
    return w.hoe_farmland(world)


def use_shears(world: WorldState) -> Outcome:
    return w.shear_sheep(world)


def use_bucket_on_cow(world: WorldState) -> Outcome:
    return w.milk_cow(world)


def use_bucket_on_water(world: WorldState) -> Outcome:
    return w.collect_water(world)


def breed_animals(world: WorldState, species: str) -> Outcome:
    """Bring two animals together, feed both and breed them."""
    total = Outcome(True)
    R = world.config.entity_radius
    a = world.agent.position

    def near_ids() -> list[int]:
        return sorted(e.id for e in world.entities.values()
                      if e.species == species and a.dist2(e.position) <= R * R)

    while len(near_ids()) < 2:
        _merge(total, w.get_animal(world, species, exclude=set(near_ids())))
    _merge(total, w.feed_animals(world, species, 2))
    _merge(total, w.breed(world, species))
    return total


def plant_seeds(world: WorldState, seed: str = "wheat_seeds") -> Outcome:
    return w.plant_seeds(world, seed)


def feed_animals(world: WorldState, species: str, count: int = 2) -> Outcome:
    return w.feed_animals(world, species, count)


def cook_food(world: WorldState, item: str, count: int = 1) -> Outcome:
    return w.smelt(world, item, count)


def eat_food(world: WorldState, food: str | None = None) -> Outcome:
    return w.eat_food(world, food)


def _equip_best(slot_class: str):
    def op(world: WorldState, optional: bool = False) -> Outcome:
        try:
            return w.equip_best(world, slot_class)
        except MissingTool:
            if optional:
                return Outcome(True, [f"No {slot_class} to equip."])
            raise
    op.__name__ = f"equip_{slot_class}"
    return op


def _count_tag(tag: str, label: str):
    def op(world: WorldState) -> Outcome:
        n = world.agent.inventory.count_key(tag)
        return Outcome(True, [f"You have {n} {label}."], data={"count": n})
    op.__name__ = f"count_{label}"
    return op


def find_suitable_position(world: WorldState, near=None) -> Outcome:
    p = w.find_suitable_position(world, near)
    if p is None:
        return Outcome(False, ["No suitable position found."])
    return Outcome(True, [f"Suitable position at {p.key()}."], data={"position": p.key()})


def _check(fn, name: str):
    def op(world: WorldState, **kwargs) -> Outcome:
        result = fn(world, **kwargs)
        return Outcome(True, [f"{name}: {str(result).lower()}"], data={"result": result})
    op.__name__ = name
    return op


def goto(world: WorldState, pos) -> Outcome:
    return w.goto(world, pos)


def get_animal(world: WorldState, species: str, pos=None) -> Outcome:
    return w.get_animal(world, species, pos)


OPS = {
    "exploreUntil": explore_until,
    "mineBlock": mine_block,
    "craftItem": craft_item,
    "placeItem": place_item,
    "smeltItem": smelt_item,
    "killMob": kill_mob,
    "getItemFromChest": get_item_from_chest,
    "depositItemIntoChest": deposit_item_into_chest,
    "checkItemInsideChest": check_item_inside_chest,
    "equipItem": equip_item,
    "consumeItem": consume_item,
    "tossItem": toss_item,
    "waitTicks": wait_ticks,
    "useHoe": use_hoe,
    "useShears": use_shears,
    "useBucketOnCow": use_bucket_on_cow,
    "useBucketOnWater": use_bucket_on_water,
    "breedAnimals": breed_animals,
    "plantSeeds": plant_seeds,
    "feedAnimals": feed_animals,
    "killAnimal": kill_mob,
    "killMonsters": kill_monsters,
    "cookFood": cook_food,
    "eatFood": eat_food,
    "equipArmor": _equip_best("armor"),
    "equipSword": _equip_best("sword"),
    "equipPickaxe": _equip_best("pickaxe"),
    "equipAxe": _equip_best("axe"),
    "equipHoe": _equip_best("hoe"),
    "equipShovel": _equip_best("shovel"),
    "getLogsCount": _count_tag("#logs", "logs"),
    "getPlanksCount": _count_tag("#planks", "planks"),
    "findSuitablePosition": find_suitable_position,
    "checkAdjacentBlock": _check(w.check_adjacent_block, "checkAdjacentBlock"),
    "checkBlockAbove": _check(w.check_block_above, "checkBlockAbove"),
    "checkBlocksAround": _check(w.check_blocks_around, "checkBlocksAround"),
    "checkNearbyBlock": _check(w.check_nearby_block, "checkNearbyBlock"),
    "checkNoAdjacentBlock": _check(w.check_no_adjacent_block, "checkNoAdjacentBlock"),
    "goto": goto,
    "getAnimal": get_animal,
}

OPERATIONAL = tuple(list(OPS)[:32])
SPATIAL = tuple(list(OPS)[32:])


def run_op(world: WorldState, name: str, args: dict | None = None) -> Outcome:
    if name not in OPS:
        raise KeyError(f"unknown primitive op {name}")
    return OPS[name](world, **(args or {}))
