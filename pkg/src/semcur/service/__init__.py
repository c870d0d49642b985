"""Composition root: engine loop, wire protocol, CLI."""

from .config import EngineConfig, load_config, parse_rounds
from .engine import Engine
from .runner import export, run_replay

__all__ = ["EngineConfig", "load_config", "parse_rounds", "Engine",
           "export", "run_replay"]
