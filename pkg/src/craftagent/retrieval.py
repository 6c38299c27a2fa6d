"""Skill retrieval: deterministic hashed embeddings, an immutable index and top-k cosine search."""
from __future__ import annotations

import re
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol, Sequence

import httpx
import numpy as np

DIM = 256
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
HASH_SEED = b"skill-index/v1:"
SCORE_DECIMALS = 12
QUERY_PREFIX = "Answer:"

_TOKEN = re.compile(r"[a-z0-9]+")


class RetrievalError(Exception):
    pass


class EmptyText(RetrievalError):
    pass


class KTooLarge(RetrievalError):
    pass


class DuplicateEntry(RetrievalError):
    pass


class EmbeddingServiceError(RetrievalError):
    pass


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


class Embedder(Protocol):
    dim: int

    def embed_many(self, texts: Sequence[str]) -> np.ndarray: ...


@dataclass(frozen=True)
class HashingEmbedder:
    """Term-frequency bag of words hashed into `dim` buckets, L2-normalised."""

    dim: int = DIM

    def embed(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise EmptyText("text is empty")
        tokens = tokenize(text)
        if not tokens:
            raise EmptyText(f"text has no alphanumeric tokens: {text!r}")
        v = np.zeros(self.dim, dtype=np.float64)
        for tok in tokens:
            v[fnv1a64(HASH_SEED + tok.encode()) % self.dim] += 1.0
        return v / np.linalg.norm(v)

    def embed_many(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack([self.embed(t) for t in texts]) if texts else np.zeros((0, self.dim))


@dataclass
class HttpEmbedder:
    """Client for an embeddings service: POST {"input": [...], "model": m} -> {"data": [{"embedding": [...]}]}."""

    base_url: str
    model: str
    dim: int = DIM
    timeout: float = 30.0
    retries: int = 2
    path: str = "/embeddings"
    backoff: float = 0.5
    transport: httpx.BaseTransport | None = None
    sleep: Callable[[float], None] = time.sleep

    def embed_many(self, texts: Sequence[str]) -> np.ndarray:
        for t in texts:
            if not t or not t.strip():
                raise EmptyText("text is empty")
        payload = {"input": list(texts), "model": self.model}
        last: Exception | None = None
        with httpx.Client(base_url=self.base_url, timeout=self.timeout, transport=self.transport) as client:
            for attempt in range(self.retries + 1):
                try:
                    r = client.post(self.path, json=payload)
                    if r.status_code >= 500:
                        raise EmbeddingServiceError(f"embedding service returned {r.status_code}")
                    if r.status_code >= 400:
                        raise EmbeddingServiceError(f"embedding service rejected request: {r.status_code}")
                    data = r.json()["data"]
                    m = np.asarray([d["embedding"] for d in data], dtype=np.float64)
                    if m.shape[0] != len(texts):
                        raise EmbeddingServiceError("embedding count does not match input count")
                    return m / np.linalg.norm(m, axis=1, keepdims=True)
                except (httpx.TransportError, EmbeddingServiceError) as exc:
                    if isinstance(exc, EmbeddingServiceError) and "rejected" in str(exc):
                        raise
                    last = exc
                    if attempt < self.retries:
                        self.sleep(self.backoff * 2 ** attempt)
        raise EmbeddingServiceError(f"embedding request failed: {last}")

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]


@dataclass(frozen=True)
class SkillIndex:
    names: tuple[str, ...]
    descriptions: tuple[str, ...]
    vectors: np.ndarray
    embedder: object

    def __len__(self) -> int:
        return len(self.names)


def build_index(descriptions: Iterable[tuple[str, str]], embedder=None) -> SkillIndex:
    """Embed (name, description) pairs into a read-only index."""
    embedder = embedder or HashingEmbedder()
    pairs = list(descriptions)
    if not pairs:
        raise EmptyText("no descriptions to index")
    names = [n for n, _ in pairs]
    seen: set[str] = set()
    for n in names:
        if n in seen:
            raise DuplicateEntry(f"duplicate skill name {n}")
        seen.add(n)
    for n, d in pairs:
        if not d or not d.strip() or not tokenize(d):
            raise EmptyText(f"skill {n} has an empty description")
    vecs = np.array(embedder.embed_many([d for _, d in pairs]), dtype=np.float64)
    vecs.setflags(write=False)
    return SkillIndex(tuple(names), tuple(d for _, d in pairs), vecs, embedder)


def query_top_k(index: SkillIndex, query_text: str, k: int = 5) -> list[tuple[str, float]]:
    """Top-k by cosine, descending; equal scores (to 12 decimals) ordered by name."""
    if k < 1 or k > len(index):
        raise KTooLarge(f"k={k} outside 1..{len(index)}")
    q = np.asarray(index.embedder.embed_many([query_text])[0], dtype=np.float64)
    scores = index.vectors @ q
    ranked = sorted(range(len(index)), key=lambda i: (-round(float(scores[i]), SCORE_DECIMALS), index.names[i]))
    return [(index.names[i], float(min(1.0, max(-1.0, scores[i])))) for i in ranked[:k]]


def query_context(subgoal: str, backend=None) -> str:
    """Query text for retrieval: the subgoal, plus the backend's answer when one is known."""
    if not subgoal or not subgoal.strip():
        raise EmptyText("subgoal is empty")
    if backend is None:
        return subgoal
    from .agent.prompts import query_context_messages

    reply = backend.complete(query_context_messages(subgoal)).strip()
    answer = reply[len(QUERY_PREFIX):].strip() if reply.startswith(QUERY_PREFIX) else reply
    if not answer or answer.rstrip(".").lower() == "unknown":
        return subgoal
    return f"{subgoal} {answer}"
