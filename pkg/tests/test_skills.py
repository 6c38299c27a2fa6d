import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from craftagent.skills import (
    OPERATIONAL, SPATIAL, CycleDetected, DanglingRemedy, DuplicateName, InvalidSkill, Prerequisite,
    SkillLibrary, SkillSpec, UnknownSkill, load_library,
)
from craftagent.world import equip, new_world, observe

from helpers import flat_world, give, place
from oracles import all_topological_orders, edges, needed_quantities, reachable

LIB = load_library()
COMPOSITIONAL = LIB.names("compositional")
DIAMOND_CHAIN = ["craftWoodenPickaxe", "craftStonePickaxe", "craftIronPickaxe", "mineDiamond"]


def spec(name, prereqs=(), kind="compositional", family="special"):
    return SkillSpec(name=name, kind=kind, family=family, description=f"{name} skill",
                     prerequisites=tuple(prereqs), body=({"op": "waitTicks", "args": {"ticks": 1}},))


# --------------------------------------------------------------------------- registry

def test_bundled_library_shape():
    assert len(OPERATIONAL) == 32 and len(SPATIAL) == 8
    prims = LIB.names("primitive")
    assert sorted(prims) == sorted(OPERATIONAL + SPATIAL)
    assert len(COMPOSITIONAL) >= 40
    families = {LIB.get(n).family for n in COMPOSITIONAL}
    assert families >= {"mineX", "craftX", "smeltX", "collectX", "makeX", "cookX", "plantX", "breedX",
                        "killX", "placeX", "special"}


def test_register_with_existing_remedy():
    lib = SkillLibrary()
    lib.register(spec("craftIronPickaxe"))
    lib.register(spec("mineDiamond", [Prerequisite("iron_pickaxe", 1, "hold", "craftIronPickaxe")]))
    assert "mineDiamond" in lib


def test_register_duplicate():
    lib = SkillLibrary()
    lib.register(spec("a"))
    with pytest.raises(DuplicateName):
        lib.register(spec("a"))


def test_register_dangling_remedy():
    with pytest.raises(DanglingRemedy):
        SkillLibrary().register(spec("a", [Prerequisite("diamond", 1, "hold", "craftUnobtainium")]))


def test_primitive_must_be_single_op():
    with pytest.raises(InvalidSkill):
        SkillSpec("p", "primitive", "operational_primitive", "x",
                  body=({"op": "goto"}, {"op": "goto"}))


def test_unknown_op_rejected():
    with pytest.raises(InvalidSkill):
        SkillSpec("p", "compositional", "special", "x", body=({"op": "teleport"},))


def test_descriptions():
    assert len(LIB.descriptions()) == len(LIB)
    assert "diamond" in dict(LIB.descriptions())["mineDiamond"].lower()
    assert SkillLibrary().descriptions() == []


def test_json_round_trip_is_byte_stable():
    from importlib import resources
    text = resources.files("craftagent.data").joinpath("skills.json").read_text()
    assert LIB.to_json() == text
    assert SkillLibrary.from_json(LIB.to_json()).to_json() == text


# --------------------------------------------------------------------------- resolve

def test_resolve_diamond_from_empty_inventory():
    plan = LIB.resolve("mineDiamond", {})
    assert len(plan) == 13
    assert [plan.index(s) for s in DIAMOND_CHAIN] == sorted(plan.index(s) for s in DIAMOND_CHAIN)
    assert plan[-1] == "mineDiamond"
    assert plan.count("craftCraftingTable") == 1


def test_resolve_diamond_quantities():
    steps = {s.skill: s.quantity for s in LIB.resolve_plan("mineDiamond", {})}
    assert steps["mineWoodLog"] == 3
    assert steps["craftPlanks"] == 11
    assert steps["craftSticks"] == 6
    assert steps["mineCobblestone"] == 11
    assert steps["smeltIronIngot"] == 3


def test_resolve_with_iron_pickaxe():
    assert LIB.resolve("mineDiamond", {"iron_pickaxe": 1}) == ["mineDiamond"]


def test_better_tool_satisfies_lower_tier():
    assert LIB.resolve("mineIronOre", {"diamond_pickaxe": 1}) == ["mineIronOre"]


def test_resolve_accepts_observation():
    w = give(flat_world(), iron_pickaxe=1)
    assert LIB.resolve("mineDiamond", observe(w)) == ["mineDiamond"]


def test_worn_armor_counts_as_held():
    w = give(flat_world(), iron_helmet=1)
    equip(w, "iron_helmet")
    assert w.agent.inventory.count("iron_helmet") == 0
    assert LIB.held(w.agent.holdings(), Prerequisite("iron_helmet", 1, "hold", "craftIronHelmet")) == 1


def test_unknown_skill():
    with pytest.raises(UnknownSkill):
        LIB.resolve("flyToMoon", {})


def test_cycle_detected():
    lib = SkillLibrary()
    lib.register_all([
        spec("a", [Prerequisite("stick", 1, "hold", "b")]),
        spec("b", [Prerequisite("coal", 1, "hold", "a")]),
    ])
    with pytest.raises(CycleDetected):
        lib.resolve("a", {})


def test_bundled_graph_is_acyclic():
    for name in LIB.names():
        LIB.check_acyclic(name)


@lru_cache(maxsize=None)
def _orders(nodes):
    return all_topological_orders(nodes, edges(LIB, nodes))


INVENTORY_ITEMS = sorted({k for n in COMPOSITIONAL for p in LIB.get(n).prerequisites
                          for k in LIB.tables.expand(p.item)})


def random_inventory(rng: random.Random) -> dict:
    return {k: rng.randint(1, 12) for k in rng.sample(INVENTORY_ITEMS, rng.randint(0, 8))}


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(COMPOSITIONAL), inv_seed=st.integers(0, 10 ** 6))
def test_resolve_matches_oracle(name, inv_seed):
    inv = random_inventory(random.Random(inv_seed))
    plan = LIB.resolve_plan(name, inv)
    expected = needed_quantities(LIB, name, inv)
    assert {s.skill: s.quantity for s in plan} == expected
    assert len(reachable(LIB, name)) <= 15
    assert tuple(s.skill for s in plan) in _orders(frozenset(expected))


# --------------------------------------------------------------------------- execute

def test_execute_diamond_chain():
    w = new_world(42)
    out = LIB.execute("mineDiamond", w)
    assert out.success
    assert out.skills_invoked == LIB.resolve("mineDiamond", {})
    assert out.inventory_after.get("diamond", 0) == 1
    assert out.ticks_consumed == w.clock


def test_execute_hoe_farmland_crafts_hoe_first():
    w = flat_world()
    place(w, "oak_log", (66, 64, 64), (66, 65, 64), (66, 66, 64))
    out = LIB.execute("hoeFarmland", w)
    assert out.success, out.log
    assert out.skills_invoked.index("craftHoe") < out.skills_invoked.index("hoeFarmland")


def test_execute_diamond_without_iron_ore_names_missing_material():
    w = flat_world(bounds=(96, 128, 96), agent_start=(48, 64, 48))
    place(w, "oak_log", (50, 64, 48), (50, 65, 48), (50, 66, 48))
    place(w, "coal_ore", (52, 60, 48))
    place(w, "diamond_ore", (52, 40, 48))
    out = LIB.execute("mineDiamond", w)
    assert not out.success
    assert "iron_ore" in out.log[-1]
    assert out.skills_invoked[-1] == "mineIronOre"


def test_execute_goto_self_costs_nothing():
    w = flat_world()
    out = LIB.execute("goto", w, args={"pos": "64,64,64"})
    assert out.success and out.ticks_consumed == 0


def test_execute_unknown_skill_reports_failure():
    out = LIB.execute("flyToMoon", flat_world())
    assert not out.success and "flyToMoon" in out.log[0]


def test_non_recursive_execution_fails_on_unmet_prerequisite():
    w = flat_world()
    out = LIB.execute("hoeFarmland", w, recursive=False)
    assert not out.success
    assert out.log == ["No hoe in inventory. Craft a hoe first!"]
    assert out.skills_invoked == ["hoeFarmland"]


def test_second_run_skips_satisfied_prerequisites():
    w = new_world(42)
    first = LIB.execute("mineDiamond", w)
    second = LIB.execute("mineDiamond", w)
    assert first.success and second.success
    assert second.skills_invoked == first.skills_invoked[-len(second.skills_invoked):]
    assert second.skills_invoked == ["mineDiamond"]


@settings(max_examples=25, deadline=None)
@given(name=st.sampled_from(COMPOSITIONAL), inv_seed=st.integers(0, 10 ** 6))
def test_plan_steps_never_meet_unmet_prerequisites(name, inv_seed):
    w = new_world(11)
    give(w, **random_inventory(random.Random(inv_seed)))
    for step in LIB.resolve_plan(name, w):
        assert LIB.unmet(step.skill, w, step.quantity) == []
        out = LIB.execute(step.skill, w, recursive=False, quantity=step.quantity)
        if not out.success:
            break


@settings(max_examples=20, deadline=None)
@given(name=st.sampled_from(COMPOSITIONAL))
def test_trace_is_prefix_of_plan(name):
    w = new_world(5)
    plan = LIB.resolve(name, w)
    out = LIB.execute(name, w)
    assert out.skills_invoked == plan[:len(out.skills_invoked)]
    if out.success:
        assert out.skills_invoked == plan


def test_skill_fixture_consumed_inputs_declared():
    """Every craftItem input is a declared prerequisite or produced earlier in the body."""
    t = LIB.tables
    for name in COMPOSITIONAL:
        s = LIB.get(name)
        declared = {p.item for p in s.prerequisites}
        produced = set()
        for op in s.body:
            if op["op"] == "mineBlock":
                for b in ([op["args"]["block"]] if isinstance(op["args"]["block"], str) else op["args"]["block"]):
                    for k in t.expand(b):
                        produced.update(t.blocks[k].get("drops", {}))
            if op["op"] == "craftItem" and op["args"]["item"] in t.recipes:
                for k in t.recipe(op["args"]["item"]).inputs:
                    assert k in declared or k in produced, (name, k)
