"""World state, tick resolution and fog-of-war views.

Tick semantics: actions issued on a tick start immediately, every pending
action is then advanced by one tick, and actions reaching zero remaining
ticks complete. Completed attacks resolve simultaneously before any death is
removed; moves, harvests, deposits, training and construction complete after
that for the survivors. Two intents claiming the same cell on one tick are
both cancelled. Cells targeted by a pending action stay reserved until it
completes or its owner dies.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

from phantomrts.engine.config import BUILDING_KINDS, MILITARY_KINDS, GameConfig
from phantomrts.engine.gamemap import GameMap

log = logging.getLogger(__name__)

DIRS4 = ((1, 0), (-1, 0), (0, 1), (0, -1))
VERBS = ("move", "attack", "harvest", "return", "produce", "build")
PRODUCES = {"base": ("worker",), "barracks": MILITARY_KINDS}


def chebyshev(ax: int, ay: int, bx: int, by: int) -> int:
    return max(abs(ax - bx), abs(ay - by))


def adjacent4(ax: int, ay: int, bx: int, by: int) -> bool:
    return abs(ax - bx) + abs(ay - by) == 1


@dataclass(slots=True)
class Entity:
    id: int
    owner: int
    kind: str
    x: int
    y: int
    hp: int
    verb: Optional[str] = None
    remaining: int = 0
    tx: int = -1
    ty: int = -1
    target: int = -1
    what: str = ""
    cargo: int = 0

    @property
    def is_building(self) -> bool:
        return self.kind in BUILDING_KINDS

    def clone(self) -> "Entity":
        return Entity(self.id, self.owner, self.kind, self.x, self.y, self.hp, self.verb,
                      self.remaining, self.tx, self.ty, self.target, self.what, self.cargo)

    def to_list(self) -> list:
        return [self.id, self.owner, self.kind, self.x, self.y, self.hp, self.verb,
                self.remaining, self.tx, self.ty, self.target, self.what, self.cargo]


class Action(NamedTuple):
    """One order. ``x, y`` is the target cell; ``target`` an entity id."""

    unit: int
    verb: str
    x: int = -1
    y: int = -1
    target: int = -1
    what: str = ""

    def to_list(self) -> list:
        return [self.unit, self.verb, self.x, self.y, self.target, self.what]


def move(unit: int, x: int, y: int) -> Action:
    return Action(unit, "move", x, y)


def attack(unit: int, target: int) -> Action:
    return Action(unit, "attack", target=target)


def harvest(unit: int, x: int, y: int) -> Action:
    return Action(unit, "harvest", x, y)


def deposit(unit: int, base: int) -> Action:
    return Action(unit, "return", target=base)


def produce(unit: int, x: int, y: int, what: str) -> Action:
    return Action(unit, "produce", x, y, what=what)


def build(unit: int, x: int, y: int, what: str) -> Action:
    return Action(unit, "build", x, y, what=what)


class Death(NamedTuple):
    id: int
    owner: int
    kind: str
    x: int
    y: int
    cost: int
    seen_by: tuple[bool, bool]


@dataclass
class GameState:
    width: int
    height: int
    walls: frozenset
    resource_cells: dict[tuple[int, int], int]
    entities: dict[int, Entity]
    stock: list[int]
    tick: int = 0
    next_id: int = 0
    spent: list[int] = field(default_factory=lambda: [0, 0])
    lost_cargo: int = 0
    occupied: dict[tuple[int, int], int] = field(default_factory=dict)
    reserved: dict[tuple[int, int], int] = field(default_factory=dict)
    deposited: list[int] = field(default_factory=lambda: [0, 0])
    combat_log: list[Death] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def copy(self) -> "GameState":
        return GameState(
            self.width, self.height, self.walls, dict(self.resource_cells),
            {i: e.clone() for i, e in self.entities.items()}, list(self.stock), self.tick, self.next_id,
            list(self.spent), self.lost_cargo, dict(self.occupied), dict(self.reserved),
            list(self.deposited), list(self.combat_log), list(self.errors),
        )

    def add_entity(self, owner: int, kind: str, x: int, y: int, config: GameConfig) -> Entity:
        e = Entity(self.next_id, owner, kind, x, y, config.max_hp(kind))
        self.entities[e.id] = e
        self.occupied[(x, y)] = e.id
        self.next_id += 1
        return e

    def alive(self, player: int) -> int:
        return sum(1 for e in self.entities.values() if e.owner == player)

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, x: int, y: int) -> bool:
        c = (x, y)
        return (self.in_bounds(x, y) and c not in self.walls and c not in self.resource_cells
                and c not in self.occupied and c not in self.reserved)

    def total_resources(self) -> int:
        """Cells + stocks + carried cargo + spending ledgers (conserved by ``advance``)."""
        cargo = sum(e.cargo for e in self.entities.values())
        return sum(self.resource_cells.values()) + sum(self.stock) + cargo + sum(self.spent) + self.lost_cargo

    def to_dict(self) -> dict:
        return {
            "tick": self.tick,
            "stock": list(self.stock),
            "spent": list(self.spent),
            "lost_cargo": self.lost_cargo,
            "next_id": self.next_id,
            "resources": sorted([x, y, a] for (x, y), a in self.resource_cells.items()),
            "entities": [self.entities[i].to_list() for i in sorted(self.entities)],
        }

    def digest(self) -> str:
        return hashlib.sha1(json.dumps(self.to_dict(), separators=(",", ":")).encode()).hexdigest()


def initial_state(gmap: GameMap, config: GameConfig) -> GameState:
    state = GameState(gmap.width, gmap.height, gmap.walls, dict(gmap.resources), {},
                      [config.starting_resources, config.starting_resources])
    for p in (0, 1):
        for x, y in gmap.bases[p]:
            state.add_entity(p, "base", x, y, config)
    for p in (0, 1):
        for x, y in gmap.workers[p]:
            state.add_entity(p, "worker", x, y, config)
    return state


def _validate(state: GameState, e: Entity, a: Action, config: GameConfig) -> Optional[str]:
    """Reason the action cannot start, or None. Stock is checked later."""
    verb = a.verb
    if verb == "move":
        if e.is_building:
            return "buildings cannot move"
        if not adjacent4(e.x, e.y, a.x, a.y):
            return "move target not adjacent"
        if not state.is_free(a.x, a.y):
            return "move target blocked"
    elif verb == "attack":
        if e.is_building:
            return "buildings cannot attack"
        t = state.entities.get(a.target)
        if t is None or t.owner == e.owner:
            return "invalid attack target"
        if chebyshev(e.x, e.y, t.x, t.y) > config.units[e.kind].attack_range:
            return "target out of range"
    elif verb == "harvest":
        if e.kind != "worker" or e.cargo:
            return "only empty workers harvest"
        if not adjacent4(e.x, e.y, a.x, a.y) or state.resource_cells.get((a.x, a.y), 0) <= 0:
            return "no adjacent resource"
    elif verb == "return":
        t = state.entities.get(a.target)
        if e.kind != "worker" or not e.cargo:
            return "nothing to return"
        if t is None or t.owner != e.owner or t.kind != "base" or not adjacent4(e.x, e.y, t.x, t.y):
            return "no adjacent own base"
    elif verb == "produce":
        if a.what not in PRODUCES.get(e.kind, ()):
            return f"{e.kind} cannot produce {a.what!r}"
        if not adjacent4(e.x, e.y, a.x, a.y) or not state.is_free(a.x, a.y):
            return "spawn cell blocked"
    elif verb == "build":
        if e.kind != "worker" or a.what not in BUILDING_KINDS:
            return "only workers build base/barracks"
        if not adjacent4(e.x, e.y, a.x, a.y) or not state.is_free(a.x, a.y):
            return "build cell blocked"
    else:
        return f"unknown verb {verb!r}"
    return None


def _duration(e: Entity, a: Action, config: GameConfig) -> int:
    v = a.verb
    if v == "move":
        return config.units[e.kind].move_ticks
    if v == "attack":
        return config.units[e.kind].attack_ticks
    if v == "harvest":
        return config.harvest_ticks
    if v == "return":
        return config.return_ticks
    if v == "produce":
        return config.units[a.what].train_ticks
    return config.buildings[a.what].build_ticks


def _visible_to(entities: Iterable[Entity], player: int, x: int, y: int, config: GameConfig) -> bool:
    for o in entities:
        if o.owner == player and chebyshev(o.x, o.y, x, y) <= config.sight(o.kind):
            return True
    return False


def advance(state: GameState, actions: Mapping[int, Iterable[Action]], config: GameConfig) -> GameState:
    """Resolve one tick in place and return ``state``."""
    state.errors = []
    state.combat_log = []
    ents = state.entities

    def reject(p, a, why):
        msg = f"t{state.tick} p{p + 1} {a.verb} unit {a.unit}: {why}"
        state.errors.append(msg)
        log.debug(msg)

    intents: list[tuple[int, Entity, Action]] = []
    for p in (0, 1):
        orders = []
        for a in actions.get(p, ()):
            if not isinstance(a, Action):
                try:
                    a = Action(*a)
                    int(a.unit)
                except (TypeError, ValueError):
                    reject(p, Action(-1, "?"), f"malformed action {a!r}")
                    continue
            orders.append(a)
        seen = set()
        for a in sorted(orders, key=lambda a: a.unit):
            e = ents.get(a.unit)
            if e is None or e.owner != p:
                reject(p, a, "not an own living entity")
                continue
            if a.unit in seen or e.verb is not None:
                reject(p, a, "entity busy")
                continue
            seen.add(a.unit)
            why = _validate(state, e, a, config)
            if why:
                reject(p, a, why)
                continue
            intents.append((p, e, a))

    claims: dict[tuple[int, int], int] = {}
    for _, _, a in intents:
        if a.verb in ("move", "produce", "build"):
            claims[(a.x, a.y)] = claims.get((a.x, a.y), 0) + 1
    for p, e, a in intents:
        if a.verb in ("move", "produce", "build") and claims[(a.x, a.y)] > 1:
            reject(p, a, "cell conflict")
            continue
        if a.verb in ("produce", "build"):
            cost = config.cost(a.what)
            if state.stock[p] < cost:
                reject(p, a, "insufficient stock")
                continue
            state.stock[p] -= cost
            state.spent[p] += cost
        e.verb = a.verb
        e.remaining = _duration(e, a, config)
        e.tx, e.ty, e.target, e.what = a.x, a.y, a.target, a.what
        if a.verb in ("move", "produce", "build"):
            state.reserved[(a.x, a.y)] = e.id

    order = sorted(ents)
    done = []
    for i in order:
        e = ents[i]
        if e.verb is not None:
            e.remaining -= 1
            if e.remaining <= 0:
                done.append(e)

    damage: dict[int, int] = {}
    for e in done:
        if e.verb == "attack":
            t = ents.get(e.target)
            if t is not None and chebyshev(e.x, e.y, t.x, t.y) <= config.units[e.kind].attack_range:
                damage[t.id] = damage.get(t.id, 0) + config.units[e.kind].damage
            e.verb = None
    for tid, dmg in damage.items():
        ents[tid].hp -= dmg
    dead = [i for i in sorted(damage) if ents[i].hp <= 0]
    if dead:
        snapshot = list(ents.values())
        for i in dead:
            e = ents[i]
            seen = tuple(e.owner == p or _visible_to(snapshot, p, e.x, e.y, config) for p in (0, 1))
            state.combat_log.append(Death(e.id, e.owner, e.kind, e.x, e.y, config.cost(e.kind), seen))
        for i in dead:
            e = ents.pop(i)
            state.occupied.pop((e.x, e.y), None)
            if e.verb in ("move", "produce", "build"):
                state.reserved.pop((e.tx, e.ty), None)
            state.lost_cargo += e.cargo

    for e in done:
        if e.id not in ents or e.verb is None:
            continue
        v, e.verb = e.verb, None
        cell = (e.tx, e.ty)
        if v == "move":
            state.reserved.pop(cell, None)
            del state.occupied[(e.x, e.y)]
            e.x, e.y = cell
            state.occupied[cell] = e.id
        elif v == "harvest":
            amount = state.resource_cells.get(cell, 0)
            if amount > 0:
                take = min(config.carry, amount)
                e.cargo = take
                if amount == take:
                    del state.resource_cells[cell]
                else:
                    state.resource_cells[cell] = amount - take
        elif v == "return":
            t = ents.get(e.target)
            if t is not None and adjacent4(e.x, e.y, t.x, t.y):
                state.stock[e.owner] += e.cargo
                state.deposited[e.owner] += e.cargo
                e.cargo = 0
        else:
            state.reserved.pop(cell, None)
            state.add_entity(e.owner, e.what, cell[0], cell[1], config)
        e.tx = e.ty = e.target = -1
        e.what = ""

    state.tick += 1
    return state


def step(state: GameState, actions: Mapping[int, Iterable[Action]], config: GameConfig) -> GameState:
    """Pure form of :func:`advance`: ``state`` is left untouched."""
    return advance(state.copy(), actions, config)


class UnitView(NamedTuple):
    id: int
    owner: int
    kind: str
    x: int
    y: int
    hp: int
    verb: Optional[str]
    what: str
    cargo: int


@dataclass(frozen=True)
class PlayerView:
    player: int
    tick: int
    width: int
    height: int
    walls: frozenset
    known_resources: frozenset
    resources: dict[tuple[int, int], int]
    stock: int
    own: tuple[UnitView, ...]
    enemies: tuple[UnitView, ...]
    combat_log: tuple[Death, ...]

    @property
    def surface(self) -> int:
        return self.width * self.height


def _unit_view(e: Entity, full: bool) -> UnitView:
    if full:
        return UnitView(e.id, e.owner, e.kind, e.x, e.y, e.hp, e.verb, e.what, e.cargo)
    return UnitView(e.id, e.owner, e.kind, e.x, e.y, e.hp, None, "", 0)


def player_view(state: GameState, player: int, config: GameConfig,
                known_resources: frozenset = frozenset()) -> PlayerView:
    own = [e for e in state.entities.values() if e.owner == player]
    eyes = [(e.x, e.y, config.sight(e.kind)) for e in own]

    def seen(x, y):
        for ox, oy, r in eyes:
            if abs(ox - x) <= r and abs(oy - y) <= r:
                return True
        return False

    enemies = tuple(_unit_view(e, False) for e in state.entities.values()
                    if e.owner != player and seen(e.x, e.y))
    res = {c: a for c, a in state.resource_cells.items() if seen(*c)}
    deaths = tuple(d for d in state.combat_log if d.seen_by[player])
    return PlayerView(player, state.tick, state.width, state.height, state.walls,
                      known_resources or frozenset(state.resource_cells), res, state.stock[player],
                      tuple(_unit_view(e, True) for e in own), enemies, deaths)
