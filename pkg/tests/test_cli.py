"""Command line: outputs, exit codes and configuration errors."""
from __future__ import annotations

import csv
import json
from importlib import resources

import pytest

from craftagent.benchmark.runner import RESULT_COLUMNS, SERIES_COLUMNS
from craftagent.cli import EXIT_CONFIG, EXIT_INTERNAL, EXIT_OK, main


def held(snapshot_path, kind: str) -> int:
    slots = json.loads(snapshot_path.read_text())["agent"]["inventory"]
    return sum(slot[1] for slot in slots if slot and slot[0] == kind)


def test_simulate_default_script(tmp_path, capsys):
    assert main(["simulate", "--seed", "3", "--out", str(tmp_path)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["success"] and out["observation"]["inventory"].get("diamond", 0) >= 1
    assert held(tmp_path / "snapshot.json", "diamond") >= 1
    assert json.loads((tmp_path / "meta.json").read_text())["command"] == "simulate"


def test_simulate_is_reproducible(tmp_path):
    for name in ("a", "b"):
        assert main(["simulate", "--seed", "7", "--out", str(tmp_path / name)]) == EXIT_OK
    assert (tmp_path / "a" / "snapshot.json").read_text() == (tmp_path / "b" / "snapshot.json").read_text()


def test_simulate_custom_script(tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"schema_version": 1, "world": None,
                               "steps": [{"skill": "mineWoodLog", "quantity": 2}, {"skill": "craftCraftingTable"}]}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    assert held(tmp_path / "o" / "snapshot.json", "crafting_table") == 1


@pytest.mark.parametrize("doc", [
    {"schema_version": 2, "steps": []},
    {"schema_version": 1},
    {"schema_version": 1, "steps": [{"skill": "flyToMoon"}]},
    {"schema_version": 1, "world": {"generator": "volcanic"}, "steps": []},
])
def test_simulate_bad_config(tmp_path, capsys, doc):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps(doc))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert capsys.readouterr().err.startswith("error:")


def test_missing_and_invalid_config(tmp_path):
    assert main(["benchmark", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["benchmark", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_benchmark_selected_tasks(tmp_path, capsys):
    rc = main(["benchmark", "--tasks", "lpt_skeleton_rounds,dpt_make_sugar", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "results.csv")))
    lpt = [int(r["ticks"]) for r in rows if r["task_id"] == "lpt_skeleton_rounds"]
    assert lpt == [15953, 3614, 416]
    assert all(r["success"] == "True" for r in rows)
    assert (tmp_path / "summary.json").exists() and (tmp_path / "meta.json").exists()


def test_benchmark_unknown_task(tmp_path):
    assert main(["benchmark", "--tasks", "nope", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_benchmark_inline_tasks_and_repetitions(tmp_path):
    cfg = tmp_path / "b.json"
    cfg.write_text(json.dumps({"repetitions": 2, "tasks": [
        {"id": "seeds", "kind": "DPT", "scenario": {"goal": "Collect Seeds"}}]}))
    assert main(["benchmark", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "o" / "results.csv")))
    assert [r["seed"] for r in rows] == ["0", "1"]


def test_http_backend_needs_settings(tmp_path):
    assert main(["benchmark", "--backend", "http", "--tasks", "dpt_make_sugar", "--out", str(tmp_path)]) == \
        EXIT_CONFIG


def test_gendata(tmp_path, capsys):
    corpus = tmp_path / "wiki"
    corpus.mkdir()
    (corpus / "farm.md").write_text("# Farming\nCrops grow on farmland.\n\n# Wheat\nSeeds come from grass.\n")
    rc = main(["gendata", "--input", str(corpus), "--word-limit", "50", "--out", str(tmp_path / "o")])
    assert rc == EXIT_OK
    lines = [json.loads(x) for x in (tmp_path / "o" / "dataset.jsonl").read_text().splitlines()]
    assert {x["prompt"] for x in lines} == {"What does the Farming section say?", "What does the Wheat section say?"}
    assert all(set(x) == {"prompt", "response", "type"} for x in lines)


def test_gendata_errors(tmp_path):
    assert main(["gendata", "--input", str(tmp_path / "missing"), "--out", str(tmp_path)]) == EXIT_CONFIG
    corpus = tmp_path / "wiki"
    corpus.mkdir()
    (corpus / "big.md").write_text("# Big\n" + "word " * 100)
    assert main(["gendata", "--input", str(corpus), "--word-limit", "10", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_evalmcq(tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("Difficulty: Easy\nKey Word: hoe\nQuestion: Which tool tills dirt?\n"
                 "Options: A. Hoe B. Axe C. Shovel D. Sword\nCorrect Answer: A\n")
    assert main(["evalmcq", "--input", str(q), "--trials", "3", "--out", str(tmp_path / "o")]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "o" / "mcq_scores.csv")))
    assert rows[0] == ["trial", "accuracy"] and len(rows) == 5
    assert rows[-1] == ["mean", "1.000000"]


def test_evalmcq_no_questions(tmp_path):
    q = tmp_path / "q.txt"
    q.write_text("nothing useful")
    assert main(["evalmcq", "--input", str(q), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_internal_error_exit_code(tmp_path, monkeypatch, capsys):
    import craftagent.cli as cli

    def boom(directory, word_limit):
        raise RuntimeError("broken invariant")

    monkeypatch.setattr(cli, "load_corpus", boom)
    assert main(["gendata", "--input", str(tmp_path), "--out", str(tmp_path / "o")]) == EXIT_INTERNAL
    assert "internal error: RuntimeError" in capsys.readouterr().err


def test_bad_flags_are_config_errors(capsys):
    assert main([]) == EXIT_CONFIG
    assert main(["benchmark", "--backend", "carrier-pigeon"]) == EXIT_CONFIG
    assert main(["--help"]) == EXIT_OK


def test_benchmark_outputs_are_idempotent(tmp_path):
    for name in ("a", "b"):
        assert main(["benchmark", "--tasks", "aet_replay,dpt_cook_meat", "--out", str(tmp_path / name)]) == EXIT_OK
    for f in ("results.csv", "summary.json", "aet_series_aet_replay.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_results_schema_documents_columns():
    schema = json.loads(resources.files("craftagent.data").joinpath("results_schema.json").read_text())
    files = schema["files"]
    assert tuple(c["name"] for c in files["results.csv"]["columns"]) == RESULT_COLUMNS
    assert tuple(c["name"] for c in files["aet_series_<task_id>.csv"]["columns"]) == ("seed",) + SERIES_COLUMNS
