from .errors import (
    AgentDead, ConfigError, InventoryFull, MissingFuel, MissingInputs, MissingStation,
    MissingTool, NoFood, NotFound, OutOfBounds, ToolTierTooLow, Unreachable,
    UnknownRecipe, UnknownSpecies, WorldError,
)
from .tables import Tables, load_tables
from .state import (
    AgentState, Entity, EquipmentSet, Inventory, ItemStack, Observation, Position, WorldConfig,
    WorldState,
)
from .sim import *  # noqa: F401,F403
from .sim import __all__ as _sim_all

__all__ = [
    "AgentDead", "ConfigError", "InventoryFull", "MissingFuel", "MissingInputs", "MissingStation",
    "MissingTool", "NoFood", "NotFound", "OutOfBounds", "ToolTierTooLow", "Unreachable",
    "UnknownRecipe", "UnknownSpecies", "WorldError", "Tables", "load_tables", "AgentState",
    "Entity", "EquipmentSet", "Inventory", "ItemStack", "Observation", "Position", "WorldConfig",
    "WorldState", *_sim_all,
]
