"""Command line entry point: simulate, benchmark, gendata, evalmcq."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import asdict
from importlib import resources
from pathlib import Path

from .agent.backends import HttpBackend
from .benchmark import load_suite, run_task, write_results
from .benchmark.runner import Harness, default_harness, load_world_config, oracle_for
from .benchmark.tasks import TaskSpec
from .datagen import (QA_TYPES, MCQ, AnswerKeyBackend, ChunkEchoBackend, build_generation_prompt, dedupe,
                      load_corpus, parse_generation_report, parse_mcq_report, score_mcq, write_jsonl)
from .datagen.errors import DatagenError
from .skills.errors import SkillError
from .world import sim
from .world.errors import ConfigError

API_KEY_ENV = "CRAFTAGENT_API_KEY"
EXIT_OK, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2
log = logging.getLogger("craftagent")


class UsageError(Exception):
    """Bad configuration or unreadable input."""


def _read_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _bundled(*parts: str) -> dict:
    return json.loads(resources.files("craftagent.data").joinpath(*parts).read_text())


def http_backend(settings: dict) -> HttpBackend:
    if "base_url" not in settings or "model" not in settings:
        raise UsageError("http backend needs base_url and model in the config's backend section")
    known = {"base_url", "model", "temperature", "timeout", "retries", "path", "backoff", "max_tokens"}
    unknown = set(settings) - known
    if unknown:
        raise UsageError(f"unknown backend settings: {sorted(unknown)}")
    try:
        return HttpBackend(api_key=os.environ.get(API_KEY_ENV), **settings)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write_meta(out: Path, command: str, args: argparse.Namespace) -> None:
    meta = {"command": command, "args": {k: str(v) for k, v in vars(args).items() if k != "func"},
            "finished_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    (out / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands ------------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _read_json(args.config) if args.config else _bundled("scripts", "mine_diamond.json")
    if cfg.get("schema_version") != 1 or not isinstance(cfg.get("steps"), list):
        raise UsageError("simulate config needs schema_version 1 and a steps list")
    world = sim.new_world(args.seed, load_world_config(cfg.get("world")))
    lib = default_harness().library
    ok = True
    for step in cfg["steps"]:
        if step.get("skill") not in lib:
            raise UsageError(f"unknown skill in script: {step.get('skill')!r}")
        outcome = lib.execute(step["skill"], world, recursive=step.get("recursive", True),
                              quantity=step.get("quantity"))
        for line in outcome.log:
            log.info(line)
        ok = ok and outcome.success
    out = _out_dir(args)
    (out / "snapshot.json").write_text(world.snapshot() + "\n")
    obs = sim.observe(world)
    print(json.dumps({"success": ok, "observation": _obs_dict(obs)}, indent=1, sort_keys=True))
    _write_meta(out, "simulate", args)
    return EXIT_OK


def _obs_dict(obs) -> dict:
    d = asdict(obs)
    d["position"] = obs.position.key()
    return d


def _suite(args, cfg: dict) -> list[TaskSpec]:
    if "tasks" in cfg:
        specs = [TaskSpec.from_dict(t) for t in cfg["tasks"]]
    else:
        specs = load_suite(cfg.get("suite"))
    if args.tasks:
        wanted = set(args.tasks.split(","))
        unknown = wanted - {s.id for s in specs}
        if unknown:
            raise UsageError(f"unknown task ids: {sorted(unknown)}")
        specs = [s for s in specs if s.id in wanted]
    if args.seed is not None:
        for s in specs:
            s.seed_base += args.seed
    if cfg.get("repetitions"):
        for s in specs:
            s.repetitions = int(cfg["repetitions"])
    return specs


def cmd_benchmark(args) -> int:
    cfg = _read_json(args.config) if args.config else {}
    specs = _suite(args, cfg)
    h = default_harness()
    if cfg.get("k"):
        h = Harness(h.library, h.index, int(cfg["k"]))
    if args.backend == "http":
        settings = cfg.get("backend", {})
        factory = lambda spec: http_backend(settings)
    else:
        factory = lambda spec: oracle_for(spec, h)
    runs = []
    for spec in specs:
        log.info("running %s (%d repetitions)", spec.id, spec.repetitions)
        runs.append(run_task(spec, factory, h, workers=int(cfg.get("workers", 1))))
    out = _out_dir(args)
    paths = write_results(runs, out)
    for p in paths.values():
        print(p)
    _write_meta(out, "benchmark", args)
    return EXIT_OK


def cmd_gendata(args) -> int:
    cfg = _read_json(args.config) if args.config else {}
    input_dir = args.input or cfg.get("input_dir")
    if not input_dir or not Path(input_dir).is_dir():
        raise UsageError(f"input directory not found: {input_dir}")
    word_limit = int(args.word_limit or cfg.get("word_limit", 800))
    qa_types = cfg.get("qa_types", list(QA_TYPES))
    if set(qa_types) - set(QA_TYPES):
        raise UsageError(f"unknown Q&A types: {sorted(set(qa_types) - set(QA_TYPES))}")
    backend = http_backend(cfg.get("backend", {})) if args.backend == "http" else ChunkEchoBackend()
    try:
        chunks = load_corpus(input_dir, word_limit)
    except DatagenError as exc:
        raise UsageError(str(exc)) from None
    pairs, dropped = [], 0
    for chunk in chunks:
        for t in qa_types:
            report = parse_generation_report(backend.complete(build_generation_prompt(t, chunk)), t)
            pairs.extend(report.pairs)
            dropped += report.dropped
    pairs = dedupe(pairs)
    out = _out_dir(args)
    n = write_jsonl(pairs, out / "dataset.jsonl")
    print(f"{n} pairs from {len(chunks)} chunks ({dropped} incomplete blocks dropped)")
    _write_meta(out, "gendata", args)
    return EXIT_OK


def _load_mcqs(path: Path) -> list[MCQ]:
    if not path.is_file():
        raise UsageError(f"question file not found: {path}")
    text = path.read_text()
    if path.suffix == ".jsonl":
        try:
            return [MCQ.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad question record in {path}: {exc}") from None
    report = parse_mcq_report(text)
    for reason in report.rejected:
        log.warning("skipped %s", reason)
    return report.questions


def cmd_evalmcq(args) -> int:
    cfg = _read_json(args.config) if args.config else {}
    src = args.input or cfg.get("questions")
    if not src:
        raise UsageError("evalmcq needs --input or a questions entry in the config")
    questions = _load_mcqs(Path(src))
    if not questions:
        raise UsageError(f"no valid questions in {src}")
    trials = int(args.trials or cfg.get("trials", 5))
    backend = http_backend(cfg.get("backend", {})) if args.backend == "http" else AnswerKeyBackend(questions)
    score = score_mcq(questions, backend, trials)
    out = _out_dir(args)
    with open(out / "mcq_scores.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "accuracy"])
        for i, acc in enumerate(score.trials, 1):
            w.writerow([i, f"{acc:.6f}"])
        w.writerow(["mean", f"{score.mean:.6f}"])
    print(f"mean accuracy {score.mean:.4f} over {trials} trials of {len(questions)} questions")
    _write_meta(out, "evalmcq", args)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="craftagent", description="Simulated open-world agent toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file for the command")
    common.add_argument("--seed", type=int, default=None, help="world seed (simulate) or seed offset (benchmark)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--backend", choices=("scripted", "http"), default="scripted")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="run a skill script against a fresh world")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("benchmark", parents=[common], help="run a task suite and write results")
    p.add_argument("--tasks", help="comma-separated task ids to run")
    p.set_defaults(func=cmd_benchmark)
    p = sub.add_parser("gendata", parents=[common], help="generate a Q&A dataset from markdown files")
    p.add_argument("--input", help="directory of markdown files")
    p.add_argument("--word-limit", type=int)
    p.set_defaults(func=cmd_gendata)
    p = sub.add_parser("evalmcq", parents=[common], help="score a backend on multiple-choice questions")
    p.add_argument("--input", help="questions as .jsonl records or raw MCQ text")
    p.add_argument("--trials", type=int)
    p.set_defaults(func=cmd_evalmcq)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports bad flags with status 2; that is a configuration error here
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "simulate" and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (UsageError, ConfigError, SkillError, DatagenError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # an invariant broke inside the library
        log.exception("internal error")
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
