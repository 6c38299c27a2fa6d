"""World errors. Each carries a human-readable message that doubles as execution feedback."""


class WorldError(Exception):
    pass


class ConfigError(WorldError):
    pass


class NotFound(WorldError):
    pass


class ToolTierTooLow(WorldError):
    pass


class InventoryFull(WorldError):
    pass


class MissingInputs(WorldError):
    def __init__(self, shortfall: dict[str, int], what: str = ""):
        self.shortfall = dict(shortfall)
        parts = ", ".join(f"{k}: {v}" for k, v in sorted(self.shortfall.items()))
        prefix = f"Cannot make {what}: " if what else ""
        super().__init__(f"{prefix}missing {parts}")


class MissingStation(WorldError):
    pass


class MissingFuel(WorldError):
    pass


class MissingTool(WorldError):
    pass


class NoFood(WorldError):
    pass


class OutOfBounds(WorldError):
    pass


class Unreachable(WorldError):
    pass


class AgentDead(WorldError):
    pass


class UnknownSpecies(WorldError):
    pass


class UnknownRecipe(WorldError):
    pass
