"""Markdown corpus splitting and greedy section packing."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import SectionTooLarge


@dataclass(frozen=True)
class Section:
    heading: str
    body: str

    @property
    def word_count(self) -> int:
        return len(self.heading.lstrip("#").split()) + len(self.body.split())

    def text(self) -> str:
        return f"{self.heading}\n{self.body}".strip() if self.heading else self.body.strip()


@dataclass(frozen=True)
class CorpusChunk:
    source_id: str
    sections: tuple[Section, ...]
    word_count: int

    def text(self) -> str:
        return "\n\n".join(s.text() for s in self.sections)


def parse_markdown(text: str) -> list[Section]:
    """Split at heading lines; text before the first heading becomes a section with an empty heading."""
    sections: list[Section] = []
    heading, body = "", []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            if heading or "".join(body).strip():
                sections.append(Section(heading, "\n".join(body).strip()))
            heading, body = line.strip(), []
        else:
            body.append(line)
    if heading or "".join(body).strip():
        sections.append(Section(heading, "\n".join(body).strip()))
    return sections


def chunk_corpus(document, word_limit: int, source_id: str = "doc") -> list[CorpusChunk]:
    """Greedily pack consecutive sections into chunks of at most word_limit words.

    `document` is markdown text or a sequence of Section.
    """
    if word_limit < 1:
        raise ValueError("word_limit must be positive")
    sections = parse_markdown(document) if isinstance(document, str) else list(document)
    chunks: list[CorpusChunk] = []
    cur: list[Section] = []
    words = 0
    for s in sections:
        n = s.word_count
        if n > word_limit:
            raise SectionTooLarge(s.heading, n, word_limit)
        if cur and words + n > word_limit:
            chunks.append(CorpusChunk(source_id, tuple(cur), words))
            cur, words = [], 0
        cur.append(s)
        words += n
    if cur:
        chunks.append(CorpusChunk(source_id, tuple(cur), words))
    return chunks


def load_corpus(directory: str | Path, word_limit: int) -> list[CorpusChunk]:
    """Chunk every markdown file in a directory, in sorted file order."""
    out: list[CorpusChunk] = []
    for path in sorted(Path(directory).glob("*.md")):
        out.extend(chunk_corpus(path.read_text(), word_limit, source_id=path.stem))
    return out
