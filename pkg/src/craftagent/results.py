"""Per-run result record shared by the agent loop and the benchmark."""
from __future__ import annotations

from dataclasses import asdict, dataclass

SECONDS_PER_TICK = 0.05
TERMINALS = ("success", "budget_exhausted", "agent_dead", "defeat")


@dataclass
class RunResult:
    task_id: str
    round: int
    success: bool
    ticks: int
    llm_iters: int
    terminal: str
    health_remaining: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.terminal not in TERMINALS:
            raise ValueError(f"unknown terminal status {self.terminal}")
        if self.ticks < 0 or self.llm_iters < 0:
            raise ValueError("ticks and llm_iters must be non-negative")

    @property
    def minutes(self) -> float:
        return self.ticks * SECONDS_PER_TICK / 60

    def to_dict(self) -> dict:
        d = asdict(self)
        d["minutes"] = self.minutes
        return d
