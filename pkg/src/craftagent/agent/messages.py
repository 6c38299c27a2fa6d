"""Role-tagged chat messages."""
from __future__ import annotations

from dataclasses import dataclass

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if not self.content or not self.content.strip():
            raise ValueError("message content is empty")

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


def system(content: str) -> ChatMessage:
    return ChatMessage("system", content)


def user(content: str) -> ChatMessage:
    return ChatMessage("user", content)


def as_dicts(messages) -> list[dict]:
    return [m.to_dict() if isinstance(m, ChatMessage) else dict(m) for m in messages]


def joined(messages) -> str:
    """All message contents, for substring matching."""
    return "\n".join(m.content if isinstance(m, ChatMessage) else m["content"] for m in messages)
