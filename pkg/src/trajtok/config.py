"""Builder configurations and their JSON loading.

A config file is a JSON object. Top-level keys are optional defaults shared by
all agent types; a nested object keyed by agent type name overrides them::

    {
      "k": 5, "tau_filter": 3, "tau_expand": 13,
      "vehicle": {"x_min": -5, "x_max": 20, "x_interval": 0.1,
                  "y_min": -1.5, "y_max": 4.5, "y_interval": 0.05},
      "kdisks": {"target_size": 2048, "radius": 0.1, "rounds": 4, "seed": 0}
    }

Grid keys absent from the file fall back to the built-in per-type grids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .core import AgentType, NormalizedDataset
from .grid import (
    DEFAULT_K,
    DEFAULT_TAU_EXPAND,
    DEFAULT_TAU_FILTER,
    DEFAULT_GRIDS,
    build_vocabulary,
    default_grid,
)
from .kdisks import build_kdisks_vocab
from .vocab import GridSpec, Vocabulary, make_grid_spec

_GRID_KEYS = ("x_min", "x_max", "x_interval", "y_min", "y_max", "y_interval")


@dataclass(frozen=True)
class TrajTokConfig:
    agent_type: AgentType = AgentType.VEHICLE
    grid: GridSpec | None = None
    k: int = DEFAULT_K
    tau_filter: int = DEFAULT_TAU_FILTER
    tau_expand: int = DEFAULT_TAU_EXPAND

    @property
    def resolved_grid(self) -> GridSpec:
        return self.grid if self.grid is not None else default_grid(self.agent_type)

    def build(self, d: NormalizedDataset) -> Vocabulary:
        return build_vocabulary(d, self.resolved_grid, self.k, self.tau_filter, self.tau_expand,
                                agent_type=self.agent_type)


@dataclass(frozen=True)
class KDisksConfig:
    agent_type: AgentType = AgentType.VEHICLE
    target_size: int = 2048
    radius: float = 0.1
    rounds: int = 1
    seed: int = 0
    grid: GridSpec | None = None

    def build(self, d: NormalizedDataset) -> Vocabulary:
        return build_kdisks_vocab(d, self.target_size, self.radius, self.rounds, self.seed,
                                  grid=self.grid, agent_type=self.agent_type)


@dataclass
class FileConfig:
    raw: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path | None) -> FileConfig:
        if path is None:
            return cls({})
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        return cls(data)

    def _section(self, agent_type: AgentType) -> dict[str, Any]:
        merged = {k: v for k, v in self.raw.items() if not isinstance(v, dict)}
        for key in (agent_type.value, *[a for a, t in _ALIASES.items() if t is agent_type]):
            if isinstance(self.raw.get(key), dict):
                merged.update(self.raw[key])
        return merged

    def grid(self, agent_type: AgentType) -> GridSpec:
        sec = self._section(agent_type)
        base = dict(zip(_GRID_KEYS, DEFAULT_GRIDS[agent_type]))
        base.update({k: float(sec[k]) for k in _GRID_KEYS if k in sec})
        return make_grid_spec(*(base[k] for k in _GRID_KEYS))

    def trajtok(self, agent_type) -> TrajTokConfig:
        agent_type = AgentType.parse(agent_type)
        sec = self._section(agent_type)
        return TrajTokConfig(
            agent_type=agent_type,
            grid=self.grid(agent_type),
            k=int(sec.get("k", DEFAULT_K)),
            tau_filter=int(sec.get("tau_filter", DEFAULT_TAU_FILTER)),
            tau_expand=int(sec.get("tau_expand", DEFAULT_TAU_EXPAND)),
        )

    def kdisks(self, agent_type, seed: int | None = None) -> KDisksConfig:
        agent_type = AgentType.parse(agent_type)
        sec = dict(self.raw.get("kdisks", {}))
        sec.update(self._section(agent_type).get("kdisks", {}))
        return KDisksConfig(
            agent_type=agent_type,
            target_size=int(sec.get("target_size", 2048)),
            radius=float(sec.get("radius", 0.1)),
            rounds=int(sec.get("rounds", 1)),
            seed=int(seed if seed is not None else sec.get("seed", 0)),
            grid=self.grid(agent_type),
        )


_ALIASES = {"bicycle": AgentType.CYCLIST}


def default_config_dict() -> dict[str, Any]:
    """The built-in defaults in config-file form."""
    out: dict[str, Any] = {"k": DEFAULT_K, "tau_filter": DEFAULT_TAU_FILTER, "tau_expand": DEFAULT_TAU_EXPAND}
    for agent_type, row in DEFAULT_GRIDS.items():
        out[agent_type.value] = dict(zip(_GRID_KEYS, row))
    out["kdisks"] = {"target_size": 2048, "radius": 0.1, "rounds": 1, "seed": 0}
    return out
