"""Game attributes and their per-game randomization."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

UNIT_KINDS = ("worker", "light", "heavy", "ranged")
MILITARY_KINDS = ("light", "heavy", "ranged")
BUILDING_KINDS = ("base", "barracks")
UNIT_FIELDS = ("cost", "hp", "damage", "attack_range", "attack_ticks", "move_ticks", "train_ticks", "sight_range")
BUILDING_FIELDS = ("cost", "hp", "build_ticks", "sight_range")
WORKER_FIELDS = ("harvest_ticks", "return_ticks", "carry")
CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class UnitStats:
    cost: int
    hp: int
    damage: int
    attack_range: int
    attack_ticks: int
    move_ticks: int
    train_ticks: int
    sight_range: int


@dataclass(frozen=True)
class BuildingStats:
    cost: int
    hp: int
    build_ticks: int
    sight_range: int


@dataclass(frozen=True)
class GameConfig:
    """All rule attributes of one game.

    ``chaos`` maps dotted attribute paths (``"units.light.cost"``,
    ``"worker.carry"``, ...) to inclusive integer ranges.
    """

    units: dict[str, UnitStats]
    buildings: dict[str, BuildingStats]
    harvest_ticks: int
    return_ticks: int
    carry: int
    max_game_ticks: int
    starting_resources: int = 5
    chaos: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        for k in UNIT_KINDS:
            if k not in self.units:
                raise ConfigError(f"missing unit kind {k}")
        for k in BUILDING_KINDS:
            if k not in self.buildings:
                raise ConfigError(f"missing building kind {k}")
        for path, value in self.flat().items():
            if value <= 0 and path != "starting_resources":
                raise ConfigError(f"{path} must be positive, got {value}")
        if self.carry not in (1, 2):
            raise ConfigError("carry must be 1 or 2")
        for k in UNIT_KINDS:
            r = self.units[k].attack_range
            if (k == "ranged") != (r > 1):
                raise ConfigError(f"{k} attack_range {r}: only ranged units attack at distance")
        for path, (lo, hi) in self.chaos.items():
            if lo > hi or lo <= 0:
                raise ConfigError(f"bad chaos range for {path}: {(lo, hi)}")

    def unit(self, kind: str):
        return self.units[kind] if kind in self.units else self.buildings[kind]

    def cost(self, kind: str) -> int:
        return self.unit(kind).cost

    def max_hp(self, kind: str) -> int:
        return self.unit(kind).hp

    def sight(self, kind: str) -> int:
        return self.unit(kind).sight_range

    def flat(self) -> dict[str, int]:
        out = {}
        for k, s in self.units.items():
            for f in UNIT_FIELDS:
                out[f"units.{k}.{f}"] = getattr(s, f)
        for k, s in self.buildings.items():
            for f in BUILDING_FIELDS:
                out[f"buildings.{k}.{f}"] = getattr(s, f)
        for f in WORKER_FIELDS:
            out[f"worker.{f}"] = getattr(self, f)
        out["max_game_ticks"] = self.max_game_ticks
        out["starting_resources"] = self.starting_resources
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": CONFIG_VERSION,
            "units": {k: {f: getattr(s, f) for f in UNIT_FIELDS} for k, s in self.units.items()},
            "buildings": {k: {f: getattr(s, f) for f in BUILDING_FIELDS} for k, s in self.buildings.items()},
            "worker": {f: getattr(self, f) for f in WORKER_FIELDS},
            "max_game_ticks": self.max_game_ticks,
            "starting_resources": self.starting_resources,
            "chaos": {k: list(v) for k, v in sorted(self.chaos.items())},
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GameConfig":
        if d.get("version", CONFIG_VERSION) != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {d.get('version')}")
        try:
            return cls(
                units={k: UnitStats(**v) for k, v in d["units"].items()},
                buildings={k: BuildingStats(**v) for k, v in d["buildings"].items()},
                harvest_ticks=d["worker"]["harvest_ticks"],
                return_ticks=d["worker"]["return_ticks"],
                carry=d["worker"]["carry"],
                max_game_ticks=d["max_game_ticks"],
                starting_resources=d.get("starting_resources", 5),
                chaos={k: tuple(v) for k, v in d.get("chaos", {}).items()},
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    def with_values(self, values: dict[str, int]) -> "GameConfig":
        d = self.to_dict()
        for path, v in values.items():
            node = d
            *parents, leaf = path.split(".")
            for p in parents:
                node = node[p]
            if leaf not in node:
                raise ConfigError(f"unknown attribute {path}")
            node[leaf] = int(v)
        return GameConfig.from_dict(d)

    def digest(self) -> str:
        """Hash of the rule attributes (chaos ranges excluded)."""
        d = self.to_dict()
        d.pop("chaos")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    @classmethod
    def load(cls, path: str | Path) -> "GameConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def default(cls) -> "GameConfig":
        text = resources.files("phantomrts").joinpath("data/default_config.json").read_text()
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def randomize_config(base: GameConfig, rng: random.Random) -> GameConfig:
    """Draw every attribute with a chaos range uniformly from that range."""
    values = {path: rng.randint(lo, hi) for path, (lo, hi) in sorted(base.chaos.items())}
    return base.with_values(values)


