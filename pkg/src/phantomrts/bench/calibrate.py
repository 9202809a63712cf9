"""Counter-matrix calibration from scripted 10-vs-10 skirmishes."""
from __future__ import annotations

import random
from typing import Optional

import numpy as np

from phantomrts import kernels
from phantomrts.engine.config import GameConfig
from phantomrts.engine.core import DIRS4, Action, GameState, advance, chebyshev
from phantomrts.upp import MILITARY_NAMES, CounterMatrix

ARENA = 16
ARMY = 10
CLAMP = (0.1, 5.0)
MAX_SKIRMISH_TICKS = 600


class CalibrationError(ValueError):
    pass


def formation(rng: random.Random, size: int = ARENA, army: int = ARMY) -> list[tuple[int, int]]:
    """A jittered line of ``army`` cells in the top third of the arena."""
    xs = rng.sample(range(1, size - 1), army)
    return [(x, 2 + rng.randint(-1, 1)) for x in sorted(xs)]


def arena_state(a: str, b: str, cells: list[tuple[int, int]], config: GameConfig, size: int = ARENA) -> GameState:
    """Army ``a`` on ``cells``; army ``b`` on their point mirror."""
    st = GameState(size, size, frozenset(), {}, {}, [0, 0])
    for x, y in cells:
        st.add_entity(0, a, x, y, config)
    for x, y in cells:
        st.add_entity(1, b, size - 1 - x, size - 1 - y, config)
    return st


def _orders(st: GameState, p: int, config: GameConfig, rng: random.Random,
            last: dict[int, tuple[int, int]]) -> list[Action]:
    own = [e for e in st.entities.values() if e.owner == p and e.verb is None]
    foes = [e for e in st.entities.values() if e.owner != p]
    if not own or not foes:
        return []
    flip = p == 1
    dirs = DIRS4 if not flip else tuple((-dx, -dy) for dx, dy in DIRS4)

    def frame(x, y):
        return (st.width - 1 - x, st.height - 1 - y) if flip else (x, y)

    field = None
    taken = set()
    out = []
    for e in sorted(own, key=lambda e: frame(e.x, e.y)):
        rng_ = config.units[e.kind].attack_range
        near = min(foes, key=lambda f: (chebyshev(e.x, e.y, f.x, f.y), f.hp, frame(f.x, f.y)))
        if chebyshev(e.x, e.y, near.x, near.y) <= rng_:
            out.append(Action(e.id, "attack", target=near.id))
            continue
        if last.get(e.id, (e.x, e.y)) != (e.x, e.y) and rng.random() < 0.5:
            continue  # cancelled by a same-cell claim last tick: back off at random
        if field is None:
            field = kernels.distance_field(np.ones((st.height, st.width), dtype=np.uint8),
                                           [(f.x, f.y) for f in foes])
        here = field[e.y, e.x]
        best = None
        for dx, dy in dirs:
            x, y = e.x + dx, e.y + dy
            if not st.is_free(x, y) or (x, y) in taken:
                continue
            if field[y, x] < here and (best is None or field[y, x] < field[best[1], best[0]]):
                best = (x, y)
        if best is not None:
            taken.add(best)
            out.append(Action(e.id, "move", *best))
    return out


def skirmish(a: str, b: str, config: GameConfig, rng: random.Random) -> tuple[int, int]:
    """(a units destroyed, b units destroyed) in one attack-nearest battle."""
    st = arena_state(a, b, formation(rng), config)
    last: dict[int, tuple[int, int]] = {}
    for _ in range(MAX_SKIRMISH_TICKS):
        if st.alive(0) == 0 or st.alive(1) == 0:
            break
        orders = {p: _orders(st, p, config, rng, last) for p in (0, 1)}
        last = {a.unit: (a.x, a.y) for p in (0, 1) for a in orders[p] if a.verb == "move"}
        advance(st, orders, config)
    return ARMY - st.alive(0), ARMY - st.alive(1)


def calibrate_counters(config: GameConfig, skirmishes: int = 200, rng: Optional[random.Random] = None) -> CounterMatrix:
    """``const[a][b]``: average over runs of clamp(b destroyed / max(1, a destroyed))."""
    if skirmishes < 1:
        raise CalibrationError("need at least one skirmish per pair")
    if all(config.units[k].damage <= 0 for k in MILITARY_NAMES):
        raise CalibrationError("no military unit can deal damage")
    rng = rng if rng is not None else random.Random(0)
    m = np.zeros((3, 3))
    for i, a in enumerate(MILITARY_NAMES):
        for j, b in enumerate(MILITARY_NAMES):
            total = 0.0
            for _ in range(skirmishes):
                lost_a, lost_b = skirmish(a, b, config, rng)
                total += min(CLAMP[1], max(CLAMP[0], lost_b / max(1, lost_a)))
            m[i, j] = total / skirmishes
    return CounterMatrix(m)
