"""Opponent model: enemy unit-type probabilities, resource estimate, army sampling."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional

from phantomrts.rdu import NEUTRAL, DeformationKind, Optimistic, Pessimistic
from phantomrts.upp import ENEMY_CAP, MILITARY_NAMES, EnemyComposition, MilitaryType

__all__ = [
    "BeliefState",
    "EconParams",
    "type_probability",
    "type_probabilities",
    "update",
    "estimate_enemy_resources",
    "sample_enemy_composition",
    "sampler_for",
    "select_phi",
]


@dataclass
class BeliefState:
    obs: tuple[int, int, int] = (0, 0, 0)
    past: tuple[int, int, int] = (0, 0, 0)
    destroyed_enemy_cost: int = 0
    destroyed_own_cost: int = 0
    seen_enemy_base: bool = False
    seen_enemy_barracks: bool = False
    observed_enemy_workers: int = 0
    game_tick: int = 0
    enemy_bases_seen: int = 0
    # enemy worker count integrated over time by ``update``; ticks with no
    # worker ever seen are kept apart and priced at the starting count
    worker_ticks: int = 0
    unseen_worker_ticks: int = 0
    # enemy military ids ever seen and not known destroyed -> type index
    seen_units: dict[int, int] = field(default_factory=dict, repr=False)
    seen_workers: set[int] = field(default_factory=set, repr=False)
    seen_bases: set[int] = field(default_factory=set, repr=False)

    def __post_init__(self):
        if min(self.obs) < 0 or min(self.past) < 0:
            raise ValueError("belief counts must be non-negative")

    @property
    def military_ever_seen(self) -> bool:
        return any(self.obs) or any(self.past) or self.destroyed_enemy_cost > 0

    def snapshot(self) -> dict:
        return {
            "obs": list(self.obs), "past": list(self.past),
            "destroyed_enemy_cost": self.destroyed_enemy_cost,
            "destroyed_own_cost": self.destroyed_own_cost,
            "seen_enemy_base": self.seen_enemy_base,
            "seen_enemy_barracks": self.seen_enemy_barracks,
            "observed_enemy_workers": self.observed_enemy_workers,
            "game_tick": self.game_tick,
            "enemy_bases_seen": self.enemy_bases_seen,
            "worker_ticks": self.worker_ticks,
            "unseen_worker_ticks": self.unseen_worker_ticks,
        }

    @classmethod
    def from_snapshot(cls, d: dict) -> "BeliefState":
        keys = ("destroyed_enemy_cost", "destroyed_own_cost", "seen_enemy_base", "seen_enemy_barracks",
                "observed_enemy_workers", "game_tick", "enemy_bases_seen", "worker_ticks", "unseen_worker_ticks")
        return cls(obs=tuple(d.get("obs", (0, 0, 0))), past=tuple(d.get("past", (0, 0, 0))),
                   **{k: d[k] for k in keys if k in d})

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True)


@dataclass(frozen=True)
class EconParams:
    worker_cost: int
    harvest_ticks: int
    move_ticks: int
    carry: int
    base_cost: int
    barracks_cost: int
    avg_resource_distance: float
    unit_costs: tuple[int, int, int]
    return_ticks: int = 0
    start_workers: int = 1
    starting_resources: int = 0
    # worker time not spent harvesting: the first trip, and putting up buildings
    lead_ticks: float = 0.0
    barracks_build_ticks: int = 0
    base_build_ticks: int = 0

    @property
    def round_trip_ticks(self) -> float:
        return self.harvest_ticks + 2.0 * self.avg_resource_distance * self.move_ticks + self.return_ticks

    @classmethod
    def from_config(cls, config, avg_resource_distance: float, start_workers: int = 1) -> "EconParams":
        return cls(
            worker_cost=config.cost("worker"),
            harvest_ticks=config.harvest_ticks,
            move_ticks=config.units["worker"].move_ticks,
            carry=config.carry,
            base_cost=config.cost("base"),
            barracks_cost=config.cost("barracks"),
            avg_resource_distance=avg_resource_distance,
            unit_costs=tuple(config.cost(k) for k in MILITARY_NAMES),
            return_ticks=config.return_ticks,
            start_workers=start_workers,
            starting_resources=config.starting_resources,
            lead_ticks=config.harvest_ticks + 2.0 * avg_resource_distance * config.units["worker"].move_ticks
            + config.return_ticks,
            barracks_build_ticks=config.buildings["barracks"].build_ticks,
            base_build_ticks=config.buildings["base"].build_ticks,
        )


def _weights(b: BeliefState) -> list[int]:
    return [1 + 2 * b.obs[t] + b.past[t] for t in range(3)]


def type_probabilities(b: BeliefState) -> tuple[float, float, float]:
    w = _weights(b)
    total = sum(w)
    return tuple(x / total for x in w)


def type_probability(b: BeliefState, t: int) -> float:
    return type_probabilities(b)[int(t)]


def update(b: BeliefState, view) -> BeliefState:
    """Fold one fog-of-war view (and its combat log) into the belief."""
    seen_units = dict(b.seen_units)
    seen_workers = set(b.seen_workers)
    seen_bases = set(b.seen_bases)
    destroyed_enemy = b.destroyed_enemy_cost
    destroyed_own = b.destroyed_own_cost
    me = view.player
    for d in view.combat_log:
        if d.owner == me:
            destroyed_own += d.cost
        else:
            destroyed_enemy += d.cost
            seen_units.pop(d.id, None)
            seen_workers.discard(d.id)
            seen_bases.discard(d.id)
    visible = [0, 0, 0]
    seen_barracks = b.seen_enemy_barracks
    for e in view.enemies:
        if e.kind in MILITARY_NAMES:
            t = MILITARY_NAMES.index(e.kind)
            seen_units[e.id] = t
            visible[t] += 1
        elif e.kind == "worker":
            seen_workers.add(e.id)
        elif e.kind == "base":
            seen_bases.add(e.id)
        elif e.kind == "barracks":
            seen_barracks = True
    dt = max(0, view.tick - b.game_tick)
    worker_ticks, unseen_ticks = b.worker_ticks, b.unseen_worker_ticks
    if seen_workers:
        worker_ticks += len(seen_workers) * dt
    else:
        unseen_ticks += dt
    visible_ids = {e.id for e in view.enemies}
    past = [0, 0, 0]
    for i, t in seen_units.items():
        if i not in visible_ids:
            past[t] += 1
    return replace(
        b,
        obs=tuple(visible), past=tuple(past),
        destroyed_enemy_cost=destroyed_enemy, destroyed_own_cost=destroyed_own,
        seen_enemy_base=b.seen_enemy_base or bool(seen_bases),
        seen_enemy_barracks=seen_barracks,
        observed_enemy_workers=len(seen_workers),
        game_tick=view.tick,
        enemy_bases_seen=max(b.enemy_bases_seen, len(seen_bases)),
        worker_ticks=worker_ticks, unseen_worker_ticks=unseen_ticks,
        seen_units=seen_units, seen_workers=seen_workers, seen_bases=seen_bases,
    )


def estimate_enemy_resources(b: BeliefState, e: EconParams) -> float:
    """Resources the opponent acquired that we cannot account for.

    Gathering runs at ``carry / round_trip_ticks`` per worker. With a belief
    built by :func:`update` the worker count is integrated over the game;
    otherwise the current count is assumed for the whole game. Worker time
    lost to the first trip and to inferred construction is not harvested.
    """
    if b.worker_ticks or b.unseen_worker_ticks:
        worker_time = b.worker_ticks + b.unseen_worker_ticks * e.start_workers
    else:
        workers = b.observed_enemy_workers if b.observed_enemy_workers > 0 else e.start_workers
        worker_time = workers * b.game_tick
    spent = b.destroyed_enemy_cost
    spent += sum((b.obs[t] + b.past[t]) * e.unit_costs[t] for t in range(3))
    idle = e.lead_ticks * e.start_workers
    if b.seen_enemy_barracks or b.military_ever_seen:
        spent += e.barracks_cost
        idle += e.barracks_build_ticks
    if b.enemy_bases_seen > 1:
        spent += e.base_cost * (b.enemy_bases_seen - 1)
        idle += e.base_build_ticks * (b.enemy_bases_seen - 1)
    gathered = e.carry * max(0.0, worker_time - idle) / e.round_trip_ticks
    return max(0.0, e.starting_resources + gathered - spent)


def sample_enemy_composition(b: BeliefState, e: EconParams, rng: random.Random) -> EnemyComposition:
    """Known enemy army plus a guess at what the unaccounted resources bought."""
    s = [b.obs[t] + b.past[t] for t in range(3)]
    budget = estimate_enemy_resources(b, e)
    cheapest = min(e.unit_costs)
    weights = _weights(b)
    types = (0, 1, 2)
    while budget >= cheapest and sum(s) < 3 * ENEMY_CAP:
        t = rng.choices(types, weights)[0]
        budget -= e.unit_costs[t]
        s[t] += 1
    return EnemyComposition(*s)


def sampler_for(b: BeliefState, e: EconParams):
    """``rng -> EnemyComposition`` closure over a frozen belief."""
    return partial(sample_enemy_composition, b, e)


def select_phi(b: BeliefState, cheapest_unit_cost: int, *, optimistic: Optional[DeformationKind] = None,
               pessimistic: Optional[DeformationKind] = None) -> DeformationKind:
    margin = 2 * cheapest_unit_cost
    if b.destroyed_enemy_cost > b.destroyed_own_cost + margin:
        return optimistic or Optimistic()
    if b.destroyed_own_cost > b.destroyed_enemy_cost + margin:
        return pessimistic or Pessimistic()
    return NEUTRAL
