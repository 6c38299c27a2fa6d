"""LLM backends: a scripted substring matcher and an OpenAI-compatible HTTP client."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import httpx

from .errors import BadStatus, EmptyCompletion, TransportError
from .messages import as_dicts, joined

DEFAULT_REPLY = '{"reasoning":"none","task":"Mine log"}'


class LLMBackend(Protocol):
    def complete(self, messages, temperature: float | None = None, max_tokens: int | None = None) -> str: ...


@dataclass
class ScriptedBackend:
    """Ordered (substring, reply) rules; the first rule found in the prompt wins."""

    rules: Sequence[tuple[str, str]]
    default: str = DEFAULT_REPLY

    def __post_init__(self):
        self.rules = [(str(k), str(v)) for k, v in self.rules]
        if not self.rules:
            raise ValueError("script has no rules")

    def complete(self, messages, temperature: float | None = None, max_tokens: int | None = None) -> str:
        text = joined(messages)
        for needle, reply in self.rules:
            if needle in text:
                return reply
        return self.default

    @classmethod
    def from_dict(cls, d: dict) -> "ScriptedBackend":
        return cls([(r["match"], r["reply"]) for r in d["rules"]], d.get("default", DEFAULT_REPLY))


@dataclass
class HttpBackend:
    """POST {model, messages, temperature} to a chat-completions endpoint."""

    base_url: str
    model: str
    temperature: float = 0.7
    timeout: float = 60.0
    retries: int = 2
    path: str = "/chat/completions"
    backoff: float = 0.5
    api_key: str | None = None
    max_tokens: int | None = None
    transport: httpx.BaseTransport | None = None
    sleep: Callable[[float], None] = time.sleep
    attempts: int = field(default=0, init=False)

    def __post_init__(self):
        url = httpx.URL(self.base_url)
        if url.scheme not in ("http", "https") or not url.host:
            raise ValueError(f"base_url must be an http(s) URL, got {self.base_url!r}")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")

    def complete(self, messages, temperature: float | None = None, max_tokens: int | None = None) -> str:
        payload = {
            "model": self.model,
            "messages": as_dicts(messages),
            "temperature": self.temperature if temperature is None else temperature,
        }
        limit = max_tokens if max_tokens is not None else self.max_tokens
        if limit is not None:
            payload["max_tokens"] = limit
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last: Exception | None = None
        with httpx.Client(base_url=self.base_url, timeout=self.timeout, transport=self.transport,
                          headers=headers) as client:
            for attempt in range(self.retries + 1):
                if attempt:
                    self.sleep(self.backoff * 2 ** (attempt - 1))
                self.attempts += 1
                try:
                    r = client.post(self.path, json=payload)
                except httpx.TransportError as exc:
                    last = TransportError(f"{type(exc).__name__}: {exc}")
                    continue
                if r.status_code >= 500:
                    last = BadStatus(r.status_code)
                    continue
                if r.status_code >= 400:
                    raise BadStatus(r.status_code, f"backend rejected request with HTTP {r.status_code}")
                return self._content(r)
        raise last  # type: ignore[misc]

    @staticmethod
    def _content(r: httpx.Response) -> str:
        try:
            data = r.json()
        except ValueError:
            raise EmptyCompletion("response body is not JSON") from None
        choices = data.get("choices") if isinstance(data, dict) else None
        if not choices:
            raise EmptyCompletion("response has no choices")
        content = (choices[0].get("message") or {}).get("content")
        if not isinstance(content, str) or not content.strip():
            raise EmptyCompletion("first choice has no content")
        return content
