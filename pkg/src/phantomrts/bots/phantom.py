"""Bot whose army composition comes from the belief model and the production solver."""
from __future__ import annotations

import random
import time
from typing import Optional

from phantomrts import belief as bel
from phantomrts.bots.common import ScriptedBot, cheb
from phantomrts.engine.config import MILITARY_KINDS, GameConfig
from phantomrts.engine.core import PlayerView, UnitView
from phantomrts.rdu import DeformationKind, kind_from_name
from phantomrts.upp import MILITARY_NAMES, CounterMatrix, ProductionPlan, ProductionState, decide_production

SMALL_MAP_SURFACE = 144


class PhantomBot(ScriptedBot):
    """Scripted economy and micro; production solved under uncertainty.

    ``phi`` is ``"auto"`` (choose the deformation from the kill ledgers) or a
    fixed deformation name. With ``budget_ms=None`` the solver runs a fixed
    number of iterations, which keeps games reproducible on any machine.
    """

    name = "phantom"

    def __init__(self, *, k: int = 30, budget_ms: Optional[float] = 100.0, max_iterations: Optional[int] = None,
                 domain_max: int = 20, phi: str = "auto", opener: bool = False,
                 counters: Optional[CounterMatrix] = None, **kw):
        super().__init__(**kw)
        self.k = k
        self.budget_ms = budget_ms
        self.max_iterations = max_iterations
        self.domain_max = domain_max
        self.phi = phi
        self.fixed_kind: Optional[DeformationKind] = None if phi == "auto" else kind_from_name(phi)
        self.opener = opener
        self.counters = counters if counters is not None else CounterMatrix.default()
        self.production_log: list[dict] = []
        self.solve_ms: list[float] = []

    def _setup(self, view: PlayerView, config: GameConfig) -> None:
        super()._setup(view, config)
        self.belief = bel.BeliefState()
        dists = [max(0, abs(x - self.home[0]) + abs(y - self.home[1]) - 2) for x, y in self.patches]
        avg = sum(dists) / len(dists) if dists else 0.0
        start = sum(1 for u in view.own if u.kind == "worker")
        self.econ = bel.EconParams.from_config(config, avg, max(1, start))
        self.plan: Optional[ProductionPlan] = None
        self.opener_left = 2 if (self.opener and view.surface < SMALL_MAP_SURFACE) else 0

    def before_act(self, view: PlayerView, config: GameConfig) -> None:
        self.belief = bel.update(self.belief, view)

    def current_kind(self, config: GameConfig) -> DeformationKind:
        if self.fixed_kind is not None:
            return self.fixed_kind
        return bel.select_phi(self.belief, min(config.cost(k) for k in MILITARY_KINDS))

    def possessed(self, view: PlayerView) -> tuple[int, int, int]:
        n = [0, 0, 0]
        for u in view.own:
            if u.kind in MILITARY_NAMES:
                n[MILITARY_NAMES.index(u.kind)] += 1
            elif u.kind == "barracks" and u.verb == "produce" and u.what in MILITARY_NAMES:
                n[MILITARY_NAMES.index(u.what)] += 1
        return tuple(n)

    def target_preference(self, unit: UnitView, enemy: UnitView) -> float:
        if self.plan is None or unit.kind not in MILITARY_NAMES or enemy.kind not in MILITARY_NAMES:
            return 0.0
        return self.plan.assign[MILITARY_NAMES.index(unit.kind)][MILITARY_NAMES.index(enemy.kind)]

    def production(self, view: PlayerView, config: GameConfig, rng: random.Random,
                   idle_barracks: list[UnitView], stock: int) -> list[str]:
        if self.opener_left:
            fastest = min(MILITARY_KINDS, key=lambda k: (config.units[k].train_ticks, MILITARY_KINDS.index(k)))
            n = min(self.opener_left, len(idle_barracks), stock // config.cost(fastest))
            self.opener_left -= n
            orders = [fastest] * n
            produce = [orders.count(k) for k in MILITARY_NAMES]
            self._log(view, stock, idle_barracks, self.possessed(view), produce, None, True,
                      self.current_kind(config), orders, 0.0, opener=True)
            return orders
        cost = tuple(config.cost(k) for k in MILITARY_NAMES)
        state = ProductionState(stock, len(idle_barracks), self.possessed(view), cost, self.counters, self.domain_max)
        kind = self.current_kind(config)
        t0 = time.perf_counter()
        plan = decide_production(state, bel.sampler_for(self.belief, self.econ), kind, self.k, self.budget_ms, rng,
                                 max_iterations=self.max_iterations)
        ms = (time.perf_counter() - t0) * 1000.0
        self.solve_ms.append(ms)
        orders: list[str] = []
        if plan.feasible:
            self.plan = plan
            # largest-count type first; ties keep light, heavy, ranged order
            for t in sorted(range(3), key=lambda t: -plan.produce[t]):
                orders += [MILITARY_NAMES[t]] * plan.produce[t]
        self._log(view, stock, idle_barracks, state.possess, list(plan.produce), [list(r) for r in plan.assign],
                  plan.feasible, kind, orders, ms)
        return orders

    def _log(self, view: PlayerView, stock: int, idle_barracks: list[UnitView], possess, produce, assign,
             feasible: bool, kind: DeformationKind, orders: list[str], ms: float, opener: bool = False) -> None:
        cost = [self._config.cost(k) for k in MILITARY_NAMES]
        self.production_log.append({
            "tick": view.tick,
            "stock": stock,
            "idle_barracks": len(idle_barracks),
            "possess": list(possess),
            "cost": cost,
            "produce": list(produce),
            "assign": assign,
            "feasible": feasible,
            "kind": kind.name,
            "opener": opener,
            "destroyed_enemy_cost": self.belief.destroyed_enemy_cost,
            "destroyed_own_cost": self.belief.destroyed_own_cost,
            "cheapest": min(cost),
            "orders": list(orders),
            "solve_ms": ms,
        })
