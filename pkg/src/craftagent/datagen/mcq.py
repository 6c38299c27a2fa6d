"""Multiple-choice question prompts, parsing and scoring."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from statistics import fmean

from ..agent.messages import ChatMessage, system, user
from ..agent.prompts import render
from .errors import NoQuestionsFound

DIFFICULTIES = ("Easy", "Medium", "Hard")
LABELS = ("A", "B", "C", "D")
_FIELD = re.compile(r"^\s*(Difficulty|Topic|Key Word|Question|Options|Correct Answer)\s*:\s*(.*)$", re.I)
_OPTION = re.compile(r"(?:^|(?<=\s))([A-D])[.)]\s*")
_CHOICE = re.compile(r"\b([A-Da-d])\b")
ANSWER_SYSTEM = "You are taking a Minecraft multiple-choice quiz. Reply with the letter of the correct option."


@dataclass(frozen=True)
class MCQ:
    difficulty: str
    keyword: str
    question: str
    options: tuple[tuple[str, str], ...]
    correct: str
    topic: str | None = None

    def __post_init__(self):
        if self.difficulty not in DIFFICULTIES:
            raise ValueError(f"difficulty must be one of {DIFFICULTIES}")
        if tuple(label for label, _ in self.options) != LABELS:
            raise ValueError("options must be labelled A, B, C, D")
        if self.correct not in LABELS:
            raise ValueError("correct answer must be one of A-D")

    def to_dict(self) -> dict:
        return {"difficulty": self.difficulty, "topic": self.topic, "keyword": self.keyword,
                "question": self.question, "options": dict(self.options), "correct": self.correct}

    @classmethod
    def from_dict(cls, d: dict) -> "MCQ":
        return cls(d["difficulty"], d["keyword"], d["question"], tuple(sorted(d["options"].items())),
                   d["correct"], d.get("topic"))


@dataclass
class MCQParse:
    questions: list[MCQ] = field(default_factory=list)
    rejected: list[str] = field(default_factory=list)


@lru_cache(maxsize=1)
def themes() -> dict[str, str]:
    doc = json.loads(resources.files("craftagent.data").joinpath("mcq_themes.json").read_text())
    return doc["themes"]


def build_mcq_prompt(keywords, source: str = "wiki", theme: str | None = None) -> list[ChatMessage]:
    """`keywords` maps keyword to question count; `source` is 'theme' or 'wiki'."""
    kw = dict(keywords)
    if not kw:
        raise ValueError("at least one keyword is needed")
    lines = "\n".join(f"{k} {n}" for k, n in kw.items())
    if source == "theme":
        if theme not in themes():
            raise ValueError(f"unknown theme {theme!r}")
        sys_text = render("mcq_theme_system", theme=theme, theme_intro=themes()[theme])
    elif source == "wiki":
        sys_text = render("mcq_wiki_system")
    else:
        raise ValueError(f"unknown MCQ source {source!r}")
    return [system(sys_text), user(render(f"mcq_{source}_user", keyword_count=len(kw), keywords=lines))]


def _split_records(raw: str) -> list[list[str]]:
    records: list[list[str]] = []
    for line in (raw or "").splitlines():
        m = _FIELD.match(line)
        if m and m.group(1).lower() == "difficulty":
            records.append([])
        if records:
            records[-1].append(line)
    return records


def _parse_record(lines: list[str]) -> MCQ | str:
    fields: dict[str, str] = {}
    current = None
    for line in lines:
        m = _FIELD.match(line)
        if m:
            current = m.group(1).lower()
            fields[current] = m.group(2).strip()
        elif current and line.strip():
            fields[current] = f"{fields[current]} {line.strip()}".strip()
    for name in ("difficulty", "key word", "question", "options", "correct answer"):
        if not fields.get(name):
            return f"missing {name}"
    difficulty = fields["difficulty"].capitalize()
    if difficulty not in DIFFICULTIES:
        return f"unknown difficulty {fields['difficulty']!r}"
    parts = _OPTION.split(fields["options"])
    labels = parts[1::2]
    texts = [t.strip() for t in parts[2::2]]
    if len(labels) != 4 or tuple(labels) != LABELS or not all(texts):
        return f"expected options A-D, found {len(labels)}"
    correct = fields["correct answer"].strip().rstrip(".")[:1].upper()
    if correct not in LABELS:
        return f"bad correct answer {fields['correct answer']!r}"
    return MCQ(difficulty, fields["key word"], fields["question"], tuple(zip(labels, texts)), correct,
               fields.get("topic") or None)


def parse_mcq_report(raw: str) -> MCQParse:
    """Total parser: valid records plus a reason for each rejected one."""
    out = MCQParse()
    for i, rec in enumerate(_split_records(raw)):
        r = _parse_record(rec)
        if isinstance(r, MCQ):
            out.questions.append(r)
        else:
            out.rejected.append(f"record {i + 1}: {r}")
    return out


def parse_mcq(raw: str, strict: bool = False) -> list[MCQ]:
    report = parse_mcq_report(raw)
    if strict and not report.questions:
        raise NoQuestionsFound("; ".join(report.rejected) or "no Difficulty: record found")
    return report.questions


def extract_choice(text: str) -> str | None:
    """First standalone A-D token, case-insensitive."""
    m = _CHOICE.search(text or "")
    return m.group(1).upper() if m else None


def answer_messages(q: MCQ) -> list[ChatMessage]:
    options = " ".join(f"{label}. {text}" for label, text in q.options)
    return [system(ANSWER_SYSTEM), user(f"Question: {q.question}\nOptions: {options}\nAnswer:")]


@dataclass(frozen=True)
class MCQScore:
    trials: tuple[float, ...]

    @property
    def mean(self) -> float:
        return fmean(self.trials)


def score_mcq(questions, backend, trials: int = 5) -> MCQScore:
    questions = list(questions)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not questions:
        raise ValueError("no questions to score")
    accs = []
    for _ in range(trials):
        right = sum(extract_choice(backend.complete(answer_messages(q))) == q.correct for q in questions)
        accs.append(right / len(questions))
    return MCQScore(tuple(accs))


class AnswerKeyBackend:
    """Answers every question with its stored correct letter."""

    def __init__(self, questions):
        self.key = {q.question: q.correct for q in questions}

    def complete(self, messages, temperature=None, max_tokens=None) -> str:
        text = messages[-1].content if isinstance(messages[-1], ChatMessage) else messages[-1]["content"]
        question = text.split("\n", 1)[0].removeprefix("Question: ")
        return self.key.get(question, "Unknown")
