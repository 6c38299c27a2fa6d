"""Desk-scale open-world agent: simulator, skill library, retrieval, agent loop, benchmark, datagen."""

__version__ = "0.1.0"
