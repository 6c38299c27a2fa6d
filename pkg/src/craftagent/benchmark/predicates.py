"""Success predicates for the dynamic-immediate planning tasks."""
from __future__ import annotations

from ..world import sim
from ..world.state import WorldState


def _holds(key: str):
    def check(world: WorldState) -> bool:
        return world.agent.inventory.count_key(key) > 0
    return check


def _farmland(world: WorldState) -> bool:
    return "hoe" in world.events or sim.check_nearby_block(world, "farmland", r=8)


DPT_PREDICATES = {
    "Collect Seeds": _holds("#seeds"),
    "Hoe Farmland": _farmland,
    "Shear Sheep": _holds("white_wool"),
    "Milk Cow": _holds("milk_bucket"),
    "Cook Meat": _holds("#cooked_meat"),
    "Obtain Leather": _holds("leather"),
    "Make Sugar": _holds("sugar"),
    "Collect Water": _holds("water_bucket"),
}

# skill execution paths each successful trace must contain, in order (alternatives separated)
DPT_PATHS = {
    "Collect Seeds": [["collectWheatSeeds"], ["collectMelonSeeds"], ["collectPumpkinSeeds"]],
    "Hoe Farmland": [["craftHoe", "hoeFarmland"]],
    "Shear Sheep": [["craftShears", "shearSheep"]],
    "Milk Cow": [["craftBucket", "milkCow"]],
    "Cook Meat": [["killPig", "cookPorkchop"], ["killChicken", "cookChicken"], ["killSheep", "cookMutton"],
                  ["killCow", "cookBeef"]],
    "Obtain Leather": [["killCow"]],
    "Make Sugar": [["collectSugarCane", "makeSugar"]],
    "Collect Water": [["craftBucket", "collectWater"]],
}

DPT_HINTS = {
    "Collect Seeds": "Break grass to collect seeds.",
    "Hoe Farmland": "Craft a hoe, then use it on grass or dirt next to water.",
    "Shear Sheep": "Craft shears from two iron ingots, then shear a sheep.",
    "Milk Cow": "Craft a bucket from three iron ingots, then milk a cow.",
    "Cook Meat": "Kill a pig, chicken, sheep or cow and cook the raw meat in a furnace.",
    "Obtain Leather": "Kill a cow; it drops leather.",
    "Make Sugar": "Collect sugar cane near water and craft it into sugar.",
    "Collect Water": "Craft a bucket from three iron ingots, then fill it from water.",
}


def is_subsequence(path, trace) -> bool:
    it = iter(trace)
    return all(step in it for step in path)


def matches_path(goal: str, trace) -> bool:
    return any(is_subsequence(p, trace) for p in DPT_PATHS[goal])
