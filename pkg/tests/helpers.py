"""Shared builders for tests: small flat worlds and random op sequences."""
from __future__ import annotations

import random

from craftagent.world import (
    Position, WorldError, attack, craft, eat_food, explore_until, goto, mine, nearest_entity,
    new_world, observe, smelt, tick,
)

CENTER = (64, 64, 64)


def flat_world(seed: int = 0, **cfg):
    base = {"generator": "flat", "bounds": (128, 128, 128), "difficulty": "normal"}
    base.update(cfg)
    return new_world(seed, base)


def give(world, **items):
    for k, n in items.items():
        world.agent.inventory.add(k, n)
    return world


def place(world, kind, *positions):
    for p in positions:
        world.blocks[Position(*p)] = kind


OP_NAMES = ("tick", "mine_log", "mine_stone", "mine_ore", "craft_planks", "craft_sticks", "craft_table",
            "craft_pickaxe", "smelt", "goto", "attack", "observe", "explore", "eat")


def random_ops(rng: random.Random, n: int) -> list[tuple]:
    ops = []
    for _ in range(n):
        name = rng.choice(OP_NAMES)
        if name == "tick":
            ops.append((name, rng.randint(0, 700)))
        elif name == "goto":
            ops.append((name, rng.randint(-20, 20), rng.randint(-20, 20)))
        else:
            ops.append((name,))
    return ops


def apply_op(world, op) -> str:
    """Run one op; world errors are part of the deterministic outcome."""
    name = op[0]
    try:
        if name == "tick":
            tick(world, op[1])
        elif name == "mine_log":
            mine(world, "#logs")
        elif name == "mine_stone":
            mine(world, "stone")
        elif name == "mine_ore":
            mine(world, "coal_ore")
        elif name == "craft_planks":
            craft(world, "oak_planks")
        elif name == "craft_sticks":
            craft(world, "stick")
        elif name == "craft_table":
            craft(world, "crafting_table")
        elif name == "craft_pickaxe":
            craft(world, "wooden_pickaxe")
        elif name == "smelt":
            smelt(world, "iron_ingot")
        elif name == "goto":
            p = world.agent.position
            goto(world, (p.x + op[1], world.config.ground_y, p.z + op[2]))
        elif name == "attack":
            e = nearest_entity(world)
            if e is not None:
                attack(world, e.id)
        elif name == "observe":
            observe(world)
        elif name == "explore":
            explore_until(world, "pumpkin", max_steps=3)
        elif name == "eat":
            eat_food(world)
    except WorldError as exc:
        return type(exc).__name__
    return "ok"


def replay(seed: int, ops) -> tuple[str, list[str]]:
    world = new_world(seed)
    results = [apply_op(world, op) for op in ops]
    return world.snapshot(), results
