"""Game-playing policies, selectable by name."""
from __future__ import annotations

from phantomrts.bots.common import PassBot, ScriptedBot
from phantomrts.bots.phantom import PhantomBot
from phantomrts.bots.scripted import BaselineBot, RushBot

BOTS = {
    "phantom": PhantomBot,
    "baseline": BaselineBot,
    "rush": RushBot,
    "pass": PassBot,
}


def make_bot(name: str, **params):
    """Fresh bot instance; ``params`` go to the constructor."""
    try:
        cls = BOTS[name]
    except KeyError:
        raise ValueError(f"unknown bot {name!r}; choose from {', '.join(BOTS)}") from None
    return cls(**params)


__all__ = ["BOTS", "make_bot", "PassBot", "ScriptedBot", "PhantomBot", "BaselineBot", "RushBot"]
