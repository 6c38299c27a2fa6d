"""Corpus chunking, Q&A generation parsing and multiple-choice evaluation."""
from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from craftagent.datagen import (
    MCQ, AnswerKeyBackend, ChunkEchoBackend, NoPairsFound, NoQuestionsFound, QAPair, SectionTooLarge, Section,
    UnknownQAType, build_generation_prompt, build_mcq_prompt, chunk_corpus, dedupe, extract_choice, format_pairs,
    load_corpus, parse_generation_report, parse_generation_response, parse_markdown, parse_mcq, parse_mcq_report,
    score_mcq, write_jsonl,
)
from craftagent.datagen.mcq import answer_messages, themes

DOC = """Intro line before any heading.

# Farming
Crops grow on farmland. Use a hoe on dirt.

## Wheat
Wheat seeds come from grass.

# Mining
Stone needs a wooden pickaxe. Iron needs a stone pickaxe.
"""

HOE_MCQ = """Difficulty: Easy
Topic: Farming
Key Word: hoe
Question: Which block becomes farmland when you use a hoe on it?
Options: A. Dirt B. Sand C. Gravel D. Stone
Correct Answer: A"""

END_MCQ = """Difficulty: Hard
Topic: Special Dimensions
Key Word: End Ship
Question: What item is usually found on an End Ship?
Options: A. Trident
B. Heart of the Sea
C. Elytra
D. Totem of Undying
Correct Answer: C"""


# -- chunking ---------------------------------------------------------------------------------

def test_parse_markdown_sections():
    secs = parse_markdown(DOC)
    assert [s.heading for s in secs] == ["", "# Farming", "## Wheat", "# Mining"]
    assert secs[0].body == "Intro line before any heading."
    assert secs[2].word_count == 1 + 5


def test_chunk_greedy_packing():
    secs = parse_markdown(DOC)
    counts = [s.word_count for s in secs]
    chunks = chunk_corpus(DOC, 20, "farm")
    assert counts == [5, 10, 6, 11]
    assert [c.word_count for c in chunks] == [15, 17]
    assert sum(c.word_count for c in chunks) == sum(counts)
    assert all(c.source_id == "farm" for c in chunks)


def test_chunk_section_too_large():
    with pytest.raises(SectionTooLarge) as info:
        chunk_corpus("# Big\n" + "word " * 30, 10)
    assert info.value.heading == "# Big"


def test_chunk_rejects_bad_limit():
    with pytest.raises(ValueError):
        chunk_corpus(DOC, 0)


words = st.lists(st.sampled_from(["iron", "ore", "wheat", "farm", "dirt"]), min_size=0, max_size=12)


@given(st.lists(st.tuples(st.text("abc", min_size=1, max_size=5), words), min_size=1, max_size=12),
       st.integers(14, 40))
def test_chunking_properties(raw_sections, limit):
    secs = [Section(f"# {h}", " ".join(b)) for h, b in raw_sections]
    chunks = chunk_corpus(secs, limit)
    flat = [s for c in chunks for s in c.sections]
    assert flat == secs
    assert all(c.word_count <= limit for c in chunks)
    assert all(c.word_count == sum(s.word_count for s in c.sections) for c in chunks)
    # greedy: the next chunk's first section would not have fit in the previous chunk
    for a, b in zip(chunks, chunks[1:]):
        assert a.word_count + b.sections[0].word_count > limit


def test_load_corpus_sorted(tmp_path):
    (tmp_path / "b.md").write_text("# B\nbee")
    (tmp_path / "a.md").write_text("# A\nant")
    (tmp_path / "skip.txt").write_text("# C\ncat")
    assert [c.source_id for c in load_corpus(tmp_path, 50)] == ["a", "b"]


# -- Q&A ------------------------------------------------------------------------------------------

def test_generation_prompt_embeds_chunk():
    chunk = chunk_corpus(DOC, 100)[0]
    msgs = build_generation_prompt("long", chunk)
    assert msgs[1].content.endswith(chunk.text() + "\n")
    with pytest.raises(UnknownQAType):
        build_generation_prompt("essay", "x")


def test_parse_generation_pairs_and_drops():
    raw = format_pairs([QAPair("What is a hoe?", "A farming tool.", "short"),
                        QAPair("What is coal?", "A fuel.", "short")])
    raw += "\nprompt\n-----------\ndangling question\n-----------\n"
    report = parse_generation_report(raw, "short")
    assert [p.prompt for p in report.pairs] == ["What is a hoe?", "What is coal?"]
    assert report.dropped == 1


@pytest.mark.parametrize("answer,expected", [("True", "T"), ("false.", "F"), ("Yes", "T"), ("F", "F")])
def test_bool_answers_normalised(answer, expected):
    raw = format_pairs([QAPair("Is dirt a block?", answer, "bool")])
    assert parse_generation_response(raw, "bool")[0].response == expected


def test_bool_non_boolean_dropped():
    raw = format_pairs([QAPair("Is dirt a block?", "Maybe", "bool")])
    report = parse_generation_report(raw, "bool")
    assert not report.pairs and report.dropped == 1


def test_strict_generation_parse():
    assert parse_generation_response("nothing here", "short") == []
    with pytest.raises(NoPairsFound):
        parse_generation_response("nothing here", "short", strict=True)


@given(st.text(max_size=200))
def test_generation_parser_is_total(raw):
    report = parse_generation_report(raw, "normal")
    assert all(p.prompt and p.response for p in report.pairs)


@given(st.lists(st.tuples(st.text("abcdef ?", min_size=1, max_size=20).filter(lambda s: s.strip()),
                          st.text("xyz .", min_size=1, max_size=20).filter(lambda s: s.strip())), max_size=6))
def test_format_then_parse_round_trip(items):
    pairs = [QAPair(" ".join(q.split()), " ".join(a.split()), "short") for q, a in items]
    pairs = [p for p in pairs if p.prompt.lower() not in ("prompt", "response")
             and p.response.lower() not in ("prompt", "response")]
    assert parse_generation_response(format_pairs(pairs), "short") == pairs


def test_dedupe_and_jsonl(tmp_path):
    a, b = QAPair("q1", "r1", "short"), QAPair("q2", "r2", "bool")
    assert dedupe([a, b, a]) == [a, b]
    path = tmp_path / "d.jsonl"
    assert write_jsonl([a, b], path) == 2
    assert [json.loads(x) for x in path.read_text().splitlines()] == [
        {"prompt": "q1", "response": "r1", "type": "short"}, {"prompt": "q2", "response": "r2", "type": "bool"}]


def test_chunk_echo_backend_one_pair_per_section():
    chunk = chunk_corpus(DOC, 100)[0]
    raw = ChunkEchoBackend().complete(build_generation_prompt("normal", chunk))
    pairs = parse_generation_response(raw, "normal")
    assert [p.prompt for p in pairs] == ["What does the Farming section say?", "What does the Wheat section say?",
                                         "What does the Mining section say?"]
    assert pairs[0].response == "Crops grow on farmland."


# -- multiple choice ------------------------------------------------------------------------------

def test_parse_published_mcq_examples():
    qs = parse_mcq(HOE_MCQ + "\n\n" + END_MCQ)
    assert [q.correct for q in qs] == ["A", "C"]
    assert qs[0].options[0] == ("A", "Dirt")
    assert qs[1].topic == "Special Dimensions"
    assert qs[1].options[2] == ("C", "Elytra")


def test_mcq_report_explains_rejections():
    broken = HOE_MCQ.replace("Correct Answer: A", "Correct Answer: E")
    report = parse_mcq_report(broken + "\n" + END_MCQ.replace("D. Totem of Undying\n", ""))
    assert not report.questions
    assert len(report.rejected) == 2
    with pytest.raises(NoQuestionsFound):
        parse_mcq("", strict=True)


def test_mcq_round_trip_dict():
    q = parse_mcq(END_MCQ)[0]
    assert MCQ.from_dict(json.loads(json.dumps(q.to_dict()))) == q


def test_mcq_validation():
    with pytest.raises(ValueError):
        MCQ("Trivial", "k", "q", (("A", "a"), ("B", "b"), ("C", "c"), ("D", "d")), "A")
    with pytest.raises(ValueError):
        MCQ("Easy", "k", "q", (("A", "a"), ("B", "b")), "A")


@pytest.mark.parametrize("reply,choice", [("C", "C"), ("The answer is B.", "B"), ("(d) Elytra", "D"),
                                          ("Unknown", None), ("", None)])
def test_extract_choice(reply, choice):
    assert extract_choice(reply) == choice


def test_build_mcq_prompt_sources():
    msgs = build_mcq_prompt({"hoe": 2, "farmland": 1}, "wiki")
    assert "following 2 keywords" in msgs[1].content and "hoe 2\nfarmland 1" in msgs[1].content
    assert set(themes()) >= {"Special Dimensions"}
    with pytest.raises(ValueError):
        build_mcq_prompt({"hoe": 1}, "theme", "Nonexistent Theme")
    with pytest.raises(ValueError):
        build_mcq_prompt({}, "wiki")


class Wrong:
    def complete(self, messages, temperature=None, max_tokens=None):
        return "B"


class Alternating:
    def __init__(self):
        self.n = 0

    def complete(self, messages, temperature=None, max_tokens=None):
        self.n += 1
        return "A" if self.n % 2 else "Z"


def test_score_mcq():
    qs = parse_mcq(HOE_MCQ + "\n\n" + END_MCQ)
    assert score_mcq(qs, AnswerKeyBackend(qs)).mean == 1.0
    assert score_mcq(qs, Wrong(), trials=3).trials == (0.0, 0.0, 0.0)
    # hoe question answered A on odd calls: trials alternate between 1/2 and 0
    s = score_mcq(qs, Alternating(), trials=4)
    assert s.trials == (0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        score_mcq(qs, Wrong(), trials=0)


def test_answer_prompt_lists_options():
    q = parse_mcq(HOE_MCQ)[0]
    body = answer_messages(q)[1].content
    assert body.startswith("Question: " + q.question)
    assert "A. Dirt B. Sand C. Gravel D. Stone" in body
