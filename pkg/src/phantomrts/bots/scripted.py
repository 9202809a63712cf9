"""Scripted opponents: random production and a light-unit rush."""
from __future__ import annotations

import random

from phantomrts.bots.common import ScriptedBot
from phantomrts.engine.config import MILITARY_KINDS, GameConfig
from phantomrts.engine.core import PlayerView, UnitView


class BaselineBot(ScriptedBot):
    """Same script as the phantom bot; each unit type drawn uniformly among affordable ones."""

    name = "baseline"

    def production(self, view: PlayerView, config: GameConfig, rng: random.Random,
                   idle_barracks: list[UnitView], stock: int) -> list[str]:
        orders = []
        for _ in idle_barracks:
            affordable = [k for k in MILITARY_KINDS if config.cost(k) <= stock]
            if not affordable:
                break
            kind = rng.choice(affordable)
            orders.append(kind)
            stock -= config.cost(kind)
        return orders


class RushBot(ScriptedBot):
    """One harvester, one barracks, light units only.

    A reconstruction of a light-rush opponent; its internals are our own.
    """

    name = "rush"

    def __init__(self, **kw):
        kw.setdefault("max_workers", 1)
        kw.setdefault("max_barracks", 1)
        kw.setdefault("extra_barracks", False)
        super().__init__(**kw)

    def production(self, view: PlayerView, config: GameConfig, rng: random.Random,
                   idle_barracks: list[UnitView], stock: int) -> list[str]:
        n = min(len(idle_barracks), stock // config.cost("light"))
        return ["light"] * n
