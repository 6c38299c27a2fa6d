"""Q&A generation prompts and delimiter-format reply parsing."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..agent.messages import ChatMessage, system, user
from ..agent.prompts import render
from .chunking import CorpusChunk
from .errors import NoPairsFound, UnknownQAType

QA_TYPES = ("short", "long", "bool", "normal")
_DELIM = re.compile(r"^\s*-{3,}\s*$", re.M)
_BOOL = {"t": "T", "true": "T", "yes": "T", "f": "F", "false": "F", "no": "F"}


@dataclass(frozen=True)
class QAPair:
    prompt: str
    response: str
    qa_type: str

    def to_dict(self) -> dict:
        return {"prompt": self.prompt, "response": self.response, "type": self.qa_type}


@dataclass
class QAParse:
    pairs: list[QAPair] = field(default_factory=list)
    dropped: int = 0
    notes: list[str] = field(default_factory=list)


def _check_type(qa_type: str) -> None:
    if qa_type not in QA_TYPES:
        raise UnknownQAType(f"unknown Q&A type {qa_type!r}; expected one of {', '.join(QA_TYPES)}")


def build_generation_prompt(qa_type: str, chunk: CorpusChunk | str) -> list[ChatMessage]:
    _check_type(qa_type)
    content = chunk.text() if isinstance(chunk, CorpusChunk) else str(chunk)
    return [system(render(f"qa_{qa_type}_system")), user(render(f"qa_{qa_type}_user", user_content=content))]


def _clean(text: str) -> str:
    return " ".join(text.replace("```", " ").split())


def parse_generation_report(raw: str, qa_type: str) -> QAParse:
    """Total parser: never raises on arbitrary text."""
    _check_type(qa_type)
    out = QAParse()
    segments = [_clean(s) for s in _DELIM.split(raw or "")]
    segments = [s for s in segments if s]
    i = 0
    while i < len(segments):
        if segments[i].lower() != "prompt":
            i += 1
            continue
        block = segments[i + 1:i + 4]
        if len(block) < 3 or block[1].lower() != "response" or block[0].lower() in ("prompt", "response") \
                or block[2].lower() in ("prompt", "response"):
            out.dropped += 1
            out.notes.append(f"incomplete block at segment {i}")
            i += 1
            continue
        prompt, response = block[0], block[2]
        if qa_type == "bool":
            norm = _BOOL.get(response.lower().rstrip("."))
            if norm is None:
                out.dropped += 1
                out.notes.append(f"non-boolean response {response!r}")
                i += 4
                continue
            response = norm
        out.pairs.append(QAPair(prompt, response, qa_type))
        i += 4
    return out


def parse_generation_response(raw: str, qa_type: str, strict: bool = False) -> list[QAPair]:
    """Complete prompt/response pairs; `strict` raises NoPairsFound when there are none."""
    report = parse_generation_report(raw, qa_type)
    if strict and not report.pairs:
        raise NoPairsFound("no complete prompt/response block found")
    return report.pairs


def dedupe(pairs) -> list[QAPair]:
    """Exact-duplicate removal, first occurrence kept."""
    seen: set[QAPair] = set()
    out = []
    for p in pairs:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def write_jsonl(pairs, path: str | Path) -> int:
    pairs = list(pairs)
    with open(path, "w") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_dict(), sort_keys=True) + "\n")
    return len(pairs)


def format_pairs(pairs) -> str:
    """Render pairs in the delimiter format the generation prompts ask for."""
    blocks = [f"prompt\n-----------\n{p.prompt}\n-----------\nresponse\n-----------\n{p.response}\n-----------"
              for p in pairs]
    return "\n".join(blocks)


class ChunkEchoBackend:
    """Offline generator: one pair per section, asking what the section covers."""

    def complete(self, messages, temperature=None, max_tokens=None) -> str:
        text = messages[-1].content if isinstance(messages[-1], ChatMessage) else messages[-1]["content"]
        marker = "Here is the user content:"
        content = text.split(marker, 1)[1] if marker in text else text
        pairs = []
        for para in content.strip().split("\n\n"):
            lines = [ln.strip() for ln in para.strip().splitlines() if ln.strip()]
            if len(lines) < 2 or not lines[0].startswith("#"):
                continue
            topic = lines[0].lstrip("#").strip()
            answer = re.split(r"(?<=[.!?])\s", " ".join(lines[1:]), maxsplit=1)[0]
            pairs.append(QAPair(f"What does the {topic} section say?", answer, "normal"))
        return format_pairs(pairs)
