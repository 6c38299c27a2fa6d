"""Skill library: primitive and compositional skills with recursive prerequisite resolution."""
from .errors import CycleDetected, DanglingRemedy, DuplicateName, InvalidSkill, SkillError, UnknownSkill
from .library import PlanStep, Prerequisite, SkillLibrary, SkillOutcome, SkillSpec, load_library
from .ops import OPERATIONAL, OPS, SPATIAL

__all__ = [
    "CycleDetected", "DanglingRemedy", "DuplicateName", "InvalidSkill", "SkillError", "UnknownSkill",
    "PlanStep", "Prerequisite", "SkillLibrary", "SkillOutcome", "SkillSpec", "load_library",
    "OPERATIONAL", "OPS", "SPATIAL",
]
