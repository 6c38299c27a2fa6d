"""Planner, actor and critic roles, prompt building, response parsing and LLM backends."""
from .backends import DEFAULT_REPLY, HttpBackend, LLMBackend, ScriptedBackend
from .errors import (AgentError, BackendError, BadStatus, ChoiceNotInCandidates, EmptyCompletion, FormatViolation,
                     MissingField, NotAPermutation, ParseFailed, TransportError)
from .loop import (ActResult, EpisodeConfig, EpisodeState, act, criticize, rerank_combat_order, run_episode,
                   task_quantity)
from .messages import ChatMessage
from .oracle import OracleBackend, judge
from .parsing import ActorChoice, CriticVerdict, PlannerOutput, parse_actor, parse_combat_order, parse_critic, parse_planner
from .prompts import LastRound, build_planner_prompt

__all__ = [
    "DEFAULT_REPLY", "HttpBackend", "LLMBackend", "ScriptedBackend", "AgentError", "BackendError", "BadStatus",
    "ChoiceNotInCandidates", "EmptyCompletion", "FormatViolation", "MissingField", "NotAPermutation",
    "ParseFailed", "TransportError", "ActResult", "EpisodeConfig", "EpisodeState", "act", "criticize",
    "rerank_combat_order", "run_episode", "task_quantity", "ChatMessage", "OracleBackend", "judge", "ActorChoice",
    "CriticVerdict", "PlannerOutput", "parse_actor", "parse_combat_order", "parse_critic", "parse_planner",
    "LastRound", "build_planner_prompt",
]
