"""Solve the three-round combat replay layout and freeze it as a world fixture.

Each round has its own respawn point with a tree, a coal cluster next to it and an
iron cluster `gap` blocks further along x. Crafting time is linear in the tree
distance and in the gap, so two probes per knob give the slope and the integer
solution; the result is verified by a full replay before it is written.
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from craftagent.agent import OracleBackend
from craftagent.benchmark import TaskSpec, default_harness, run_lpt

TARGETS = (15953, 3614, 416)
POINTS = ((500, 64, 500), (2000, 64, 2000), (3500, 64, 3500))
ORE_COUNTS = ((30, 8), (4, 2), (0, 0))  # iron, coal placed per round
# round two needs an odd number of extra ticks, which only the slower deepslate coal gives
COAL_KINDS = ("coal_ore", "deepslate_coal_ore", "coal_ore")
SEARCH_RADIUS = 800
OUT = Path(__file__).resolve().parents[1] / "src" / "craftagent" / "data" / "worlds" / "lpt_arena.json"


def layout(knobs) -> dict:
    placements = []
    for (x, _, z), (tree, gap), (iron, coal), coal_kind in zip(POINTS, knobs, ORE_COUNTS, COAL_KINDS):
        placements.append({"block": "oak_log", "from": f"{x + tree},64,{z}", "to": f"{x + tree},67,{z}"})
        placements += [{"block": coal_kind, "at": f"{x + tree + 3 + i},63,{z + 3}"} for i in range(coal)]
        placements += [{"block": "iron_ore", "at": f"{x + tree + gap + i % 6},63,{z + 3 + i // 6}"}
                       for i in range(iron)]
    return {
        "name": "lpt_arena",
        "description": "Flat world with one resource site per combat round, tuned to the three-round skeleton replay.",
        "generator": "flat",
        "bounds": [4096, 256, 4096],
        "search_radius": SEARCH_RADIUS,
        "respawn_points": [list(p) for p in POINTS],
        "placements": placements,
    }


def replay(knobs) -> list[int]:
    h = default_harness()
    spec = TaskSpec("lpt_skeleton_replay", "LPT_multi", {"monsters": "1 skeleton", "rounds": 3, "world": layout(knobs)})
    return [r.ticks for r in run_lpt(spec, OracleBackend(h.library))]


def solve() -> list[tuple[int, int]]:
    knobs = [[5, 20], [5, 20], [5, 0]]
    base = replay(knobs)
    for r in range(3):
        probe = [list(k) for k in knobs]
        probe[r][0] += 1
        slope_tree = replay(probe)[r] - base[r]
        need = TARGETS[r] - base[r]
        if r < 2:
            probe = [list(k) for k in knobs]
            probe[r][1] += 1
            slope_gap = replay(probe)[r] - base[r]
            # round two keeps the tree well inside the search radius and puts the rest into the gap
            tree_share = 395 if r == 1 else 0
            need -= tree_share * slope_tree
            knobs[r][0] += tree_share
            knobs[r][1] += need // slope_gap
            need %= slope_gap
        if need % slope_tree:
            raise SystemExit(f"round {r + 1}: {need} ticks left over, not a multiple of {slope_tree}")
        knobs[r][0] += need // slope_tree
    return [tuple(k) for k in knobs]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    knobs = solve()
    got = replay(knobs)
    if tuple(got) != TARGETS:
        raise SystemExit(f"replay gave {got}, expected {TARGETS}")
    args.out.write_text(json.dumps(layout(knobs), indent=1) + "\n")
    print(f"knobs {knobs} -> ticks {got}; wrote {args.out}")


if __name__ == "__main__":
    main()
