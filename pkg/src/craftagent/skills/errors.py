"""Skill registry errors."""


class SkillError(Exception):
    """Base class for skill registry and resolver errors."""


class DuplicateName(SkillError):
    pass


class DanglingRemedy(SkillError):
    pass


class CycleDetected(SkillError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("Prerequisite cycle: " + " -> ".join(cycle))


class UnknownSkill(SkillError):
    pass


class InvalidSkill(SkillError):
    pass
