"""Game loop, outcomes and line-delimited JSON traces."""
from __future__ import annotations

import hashlib
import json
import logging
import random
import traceback
from dataclasses import dataclass
from enum import Enum
from typing import IO, Any, Optional, Protocol

from phantomrts.engine.config import GameConfig
from phantomrts.engine.core import Action, GameState, PlayerView, advance, initial_state, player_view
from phantomrts.engine.gamemap import GameMap

log = logging.getLogger(__name__)


def derive_seed(*parts: Any) -> int:
    """Stable 63-bit seed from any tuple of printable parts."""
    h = hashlib.sha256("/".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(h[:8], "big") >> 1


class BotPolicy(Protocol):
    def act(self, view: PlayerView, config: GameConfig, rng: random.Random) -> list[Action]: ...


class Winner(Enum):
    PLAYER1 = 1
    PLAYER2 = 2
    DRAW = 0


@dataclass(frozen=True)
class Outcome:
    winner: Winner
    ticks_played: int
    reason: str = ""

    @property
    def scores(self) -> tuple[float, float]:
        if self.winner is Winner.PLAYER1:
            return 1.0, 0.0
        if self.winner is Winner.PLAYER2:
            return 0.0, 1.0
        return 0.5, 0.5

    def to_dict(self) -> dict:
        return {"winner": self.winner.name.lower(), "ticks": self.ticks_played,
                "scores": list(self.scores), "reason": self.reason}


def _judge(state: GameState) -> Optional[Winner]:
    a1, a2 = state.alive(0) > 0, state.alive(1) > 0
    if a1 and a2:
        return None
    if a1:
        return Winner.PLAYER1
    if a2:
        return Winner.PLAYER2
    return Winner.DRAW


def run_game(
    bot1: BotPolicy,
    bot2: BotPolicy,
    gmap: GameMap,
    config: GameConfig,
    seed: int,
    *,
    trace: Optional[IO[str]] = None,
    state: Optional[GameState] = None,
) -> Outcome:
    """Play one game to completion.

    Each bot gets its own random source derived from ``seed``. A bot raising
    an exception loses immediately; if both raise on the same tick the game
    is a draw.
    """
    state = state if state is not None else initial_state(gmap, config)
    known = frozenset(gmap.resources)
    bots = (bot1, bot2)
    rngs = [random.Random(derive_seed(seed, "bot", p)) for p in (0, 1)]
    if trace is not None:
        trace.write(json.dumps({"header": {"map": gmap.name, "seed": seed, "config": config.digest()}},
                               sort_keys=True) + "\n")

    outcome = None
    while outcome is None:
        w = _judge(state)
        if w is not None:
            outcome = Outcome(w, state.tick, "elimination")
            break
        if state.tick >= config.max_game_ticks:
            outcome = Outcome(Winner.DRAW, state.tick, "timeout")
            break
        actions: dict[int, list[Action]] = {}
        crashed = []
        for p in (0, 1):
            view = player_view(state, p, config, known)
            try:
                actions[p] = list(bots[p].act(view, config, rngs[p]) or ())
            except Exception:
                log.warning("bot %d crashed:\n%s", p + 1, traceback.format_exc())
                crashed.append(p)
        if crashed:
            if len(crashed) == 2:
                outcome = Outcome(Winner.DRAW, state.tick, "both bots crashed")
            else:
                winner = Winner.PLAYER2 if crashed[0] == 0 else Winner.PLAYER1
                outcome = Outcome(winner, state.tick, f"bot {crashed[0] + 1} crashed")
            break
        tick = state.tick
        advance(state, actions, config)
        if trace is not None:
            rec = {
                "tick": tick,
                "digest": state.digest(),
                "actions": {str(p + 1): [list(a) for a in actions[p]] for p in (0, 1)},
                "log": [list(d[:6]) for d in state.combat_log],
                "errors": state.errors,
            }
            trace.write(json.dumps(rec, separators=(",", ":")) + "\n")
    if trace is not None:
        trace.write(json.dumps({"outcome": outcome.to_dict()}, sort_keys=True) + "\n")
    return outcome
