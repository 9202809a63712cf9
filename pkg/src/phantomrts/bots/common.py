"""Scripted economy and combat behaviour shared by every non-trivial bot.

Subclasses only decide what the idle barracks train (:meth:`ScriptedBot.production`).
Bots see the game exclusively through :class:`~phantomrts.engine.PlayerView`.
"""
from __future__ import annotations

import random
from collections import deque
from typing import Optional, Sequence

import numpy as np

from phantomrts import kernels
from phantomrts.engine.config import MILITARY_KINDS, GameConfig
from phantomrts.engine.core import Action, PlayerView, UnitView, attack, build, deposit, harvest, move, produce

DIRS4 = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _xy(p) -> tuple[int, int]:
    return (p.x, p.y) if isinstance(p, UnitView) else (p[0], p[1])


def cheb(a: UnitView | tuple, b: UnitView | tuple) -> int:
    (ax, ay), (bx, by) = _xy(a), _xy(b)
    return max(abs(ax - bx), abs(ay - by))


class PassBot:
    """Issues no orders."""

    name = "pass"

    def act(self, view: PlayerView, config: GameConfig, rng: random.Random) -> list[Action]:
        return []


class ScriptedBot:
    """Harvest, build barracks, train workers, attack-move the army.

    ``patch_radius`` and ``income_window`` quantify "several resource patches
    near the base" and "gathering faster than spending".
    """

    name = "scripted"

    def __init__(self, *, patch_radius: int = 6, income_window: int = 100, max_barracks: int = 3,
                 extra_barracks: bool = True, max_workers: Optional[int] = None, produce_units: bool = True,
                 wave_size: int = 1, defend_radius: int = 6):
        self.wave_size = wave_size
        self.defend_radius = defend_radius
        self.patch_radius = patch_radius
        self.income_window = income_window
        self.max_barracks = max_barracks
        self.extra_barracks = extra_barracks
        self.max_workers = max_workers
        self.produce_units = produce_units
        self.player: Optional[int] = None

    # -- per-game state ---------------------------------------------------
    def _setup(self, view: PlayerView, config: GameConfig) -> None:
        self.player = view.player
        self.size = (view.width, view.height)
        # tie-breaks are taken in the player's own frame so mirrored starts play mirrored games
        self.dirs = DIRS4 if view.player == 0 else tuple((-dx, -dy) for dx, dy in DIRS4)
        bases = [u for u in view.own if u.kind == "base"]
        anchor = bases[0] if bases else view.own[0]
        self.home = (anchor.x, anchor.y)
        self.enemy_guess = (view.width - 1 - anchor.x, view.height - 1 - anchor.y)
        # a patch is near our base if within the radius and closer to us than to the mirrored start
        self.patches = sorted(
            (c for c in view.known_resources
             if cheb(c, self.home) <= self.patch_radius and cheb(c, self.home) < cheb(c, self.enemy_guess)),
            key=lambda c: (cheb(c, self.home), self.frame(c)))
        target = 1 + len(self.patches)
        self.target_workers = target if self.max_workers is None else min(target, self.max_workers)
        self.depleted: set[tuple[int, int]] = set()
        self.enemy_buildings: dict[int, tuple[int, int, str]] = {}
        self.stock_history: deque[tuple[int, int]] = deque()
        self._passable_key = None
        self._passable = None
        self._fields: dict = {}
        self.guess_cleared = False
        self._last_moves: dict[int, tuple[int, int]] = {}
        self.attacking = False
        self.rally = self._rally_point(view)

    def _rally_point(self, view: PlayerView) -> tuple[int, int]:
        """Open cell about a third of the way from home toward the enemy start."""
        hx, hy = self.home
        gx, gy = self.enemy_guess
        want = (hx + (gx - hx) // 3, hy + (gy - hy) // 3)
        cells = [(x, y) for x in range(view.width) for y in range(view.height)
                 if (x, y) not in view.walls and (x, y) not in view.known_resources]
        return min(cells, key=lambda c: (abs(c[0] - want[0]) + abs(c[1] - want[1]), self.frame(c)))

    def reset(self) -> None:
        self.player = None

    # -- helpers ------------------------------------------------------------
    def _remember(self, view: PlayerView) -> None:
        for c in view.known_resources:
            if c not in self.depleted and c not in view.resources and self._visible(view, c):
                self.depleted.add(c)
        for d in view.combat_log:
            self.enemy_buildings.pop(d.id, None)
        seen_ids = set()
        for e in view.enemies:
            seen_ids.add(e.id)
            if e.kind in ("base", "barracks"):
                self.enemy_buildings[e.id] = (e.x, e.y, e.kind)
        for i, (x, y, _) in list(self.enemy_buildings.items()):
            if i not in seen_ids and self._visible(view, (x, y)):
                del self.enemy_buildings[i]
        if not self.guess_cleared and self._visible(view, self.enemy_guess) and not view.enemies:
            self.guess_cleared = True
        self.stock_history.append((view.tick, view.stock))
        while self.stock_history and self.stock_history[0][0] < view.tick - self.income_window:
            self.stock_history.popleft()

    def _visible(self, view: PlayerView, c: tuple[int, int]) -> bool:
        cfg = self._config
        for u in view.own:
            if cheb(u, c) <= cfg.sight(u.kind):
                return True
        return False

    def frame(self, c: tuple[int, int]) -> tuple[int, int]:
        if self.player == 0:
            return c
        return self.size[0] - 1 - c[0], self.size[1] - 1 - c[1]

    def income_and_spend(self) -> tuple[int, int]:
        income = spend = 0
        prev = None
        for _, s in self.stock_history:
            if prev is not None:
                if s > prev:
                    income += s - prev
                else:
                    spend += prev - s
            prev = s
        return income, spend

    def resources(self) -> list[tuple[int, int]]:
        return [c for c in self._view.known_resources if c not in self.depleted]

    def passable(self) -> np.ndarray:
        v = self._view
        buildings = tuple(sorted((u.x, u.y) for u in v.own if u.kind in ("base", "barracks")))
        enemy_b = tuple(sorted((x, y) for x, y, _ in self.enemy_buildings.values()))
        key = (len(self.depleted), buildings, enemy_b)
        if key != self._passable_key:
            grid = np.ones((v.height, v.width), dtype=np.uint8)
            for x, y in v.walls:
                grid[y, x] = 0
            for x, y in self.resources():
                grid[y, x] = 0
            for x, y in buildings + enemy_b:
                grid[y, x] = 0
            self._passable_key, self._passable = key, grid
            self._fields = {}
        return self._passable

    def field(self, sources: Sequence[tuple[int, int]]) -> np.ndarray:
        grid = self.passable()
        key = tuple(sorted(sources))
        f = self._fields.get(key)
        if f is None:
            f = kernels.distance_field(grid, key if key else np.empty((0, 2), dtype=np.int64))
            if len(self._fields) > 32:
                self._fields.clear()
            self._fields[key] = f
        return f

    def is_free(self, c: tuple[int, int]) -> bool:
        x, y = c
        v = self._view
        return (0 <= x < v.width and 0 <= y < v.height and c not in v.walls
                and self._passable[y, x] and c not in self._taken)

    def step_toward(self, u: UnitView, field: np.ndarray) -> Optional[Action]:
        if u.id in self._stalled and self._rng.random() < 0.5:
            # our last move was cancelled by a same-cell claim; back off at random
            return None
        here = field[u.y, u.x]
        best, best_d = None, None
        for dx, dy in self.dirs:
            c = (u.x + dx, u.y + dy)
            if not self.is_free(c):
                continue
            d = field[c[1], c[0]]
            if d < 0:
                continue
            if (here < 0 or d < here) and (best_d is None or d < best_d):
                best, best_d = c, d
        if best is None:
            return None
        self._taken.add(best)
        return move(u.id, *best)

    def free_adjacent(self, u: UnitView, toward: tuple[int, int]) -> Optional[tuple[int, int]]:
        cells = [(u.x + dx, u.y + dy) for dx, dy in self.dirs]
        cells = [c for c in cells if self.is_free(c)]
        if not cells:
            return None
        return min(cells, key=lambda c: (abs(c[0] - toward[0]) + abs(c[1] - toward[1]), self.frame(c)))

    def enemy_targets(self) -> list[tuple[int, int]]:
        cells = [(e.x, e.y) for e in self._view.enemies]
        cells += [(x, y) for x, y, _ in self.enemy_buildings.values()]
        if not cells and not self.guess_cleared:
            cells = [self.enemy_guess]
        if not cells:
            # nothing known: sweep the unexplored far half of the map
            v = self._view
            cells = [(x, y) for x in range(v.width) for y in range(v.height)
                     if cheb((x, y), self.home) > max(v.width, v.height) // 2 and (x, y) not in v.walls]
        return cells

    def front(self) -> tuple[int, int]:
        if self.enemy_buildings:
            x, y, _ = min(self.enemy_buildings.values(), key=lambda b: self.frame(b[:2]))
            return x, y
        return self.enemy_guess

    def build_site(self, view: PlayerView) -> Optional[tuple[int, int]]:
        res = set(self.resources())
        best = None
        for x in range(view.width):
            for y in range(view.height):
                c = (x, y)
                if cheb(c, self.home) < 2 or not self.is_free(c):
                    continue
                if any(cheb(c, r) <= 1 for r in res):
                    continue
                if any(cheb(c, (u.x, u.y)) <= 1 for u in view.own if u.kind in ("base", "barracks")):
                    continue
                key = (abs(x - self.home[0]) + abs(y - self.home[1]), self.frame(c))
                if best is None or key < best[0]:
                    best = (key, c)
        return best[1] if best else None

    # -- production hooks -----------------------------------------------------
    def production(self, view: PlayerView, config: GameConfig, rng: random.Random,
                   idle_barracks: list[UnitView], stock: int) -> list[str]:
        """Unit kinds to train, one per idle barracks in order (may be shorter)."""
        return []

    def target_preference(self, unit: UnitView, enemy: UnitView) -> float:
        return 0.0

    # -- main loop --------------------------------------------------------------
    def act(self, view: PlayerView, config: GameConfig, rng: random.Random) -> list[Action]:
        if self.player is None:
            self._setup(view, config)
        self._view, self._config, self._rng = view, config, rng
        self._stalled = {u.id for u in view.own
                         if u.verb is None and self._last_moves.get(u.id, (u.x, u.y)) != (u.x, u.y)}
        self._remember(view)
        self.passable()
        self._taken = {(u.x, u.y) for u in view.own} | {(e.x, e.y) for e in view.enemies}
        self.before_act(view, config)
        actions: list[Action] = []
        stock = view.stock
        own = view.own
        workers = [u for u in own if u.kind == "worker"]
        bases = [u for u in own if u.kind == "base"]
        barracks = [u for u in own if u.kind == "barracks"]
        building_barracks = [u for u in workers if u.verb == "build"]
        busy: set[int] = set()

        # construction
        n_barracks = len(barracks) + len(building_barracks)
        want_barracks = n_barracks == 0
        if not want_barracks and self.extra_barracks and n_barracks < self.max_barracks and not building_barracks:
            income, spend = self.income_and_spend()
            want_barracks = view.tick >= self.income_window and income > spend
        bcost = config.cost("barracks")
        if want_barracks and stock >= bcost:
            a = self._construct(view, workers, busy)
            if a is not None:
                actions.append(a)
                stock -= bcost
        saving = n_barracks == 0 and bool(workers)

        # base trains workers
        wcost = config.cost("worker")
        in_training = sum(1 for b in bases if b.verb == "produce")
        for b in bases:
            if b.verb is not None:
                continue
            if len(workers) + in_training >= self.target_workers:
                break
            if stock - (bcost if saving else 0) < wcost:
                break
            cell = self.free_adjacent(b, self.patches[0] if self.patches else self.home)
            if cell is None:
                continue
            self._taken.add(cell)
            actions.append(produce(b.id, cell[0], cell[1], "worker"))
            stock -= wcost
            in_training += 1

        # barracks train military units
        idle = [b for b in barracks if b.verb is None]
        if idle and self.produce_units and stock >= min(config.cost(k) for k in MILITARY_KINDS):
            front = self.front()
            idle.sort(key=lambda b: (abs(b.x - front[0]) + abs(b.y - front[1]), b.id))
            kinds = self.production(view, config, rng, idle, stock)
            for b, kind in zip(idle, kinds):
                cost = config.cost(kind)
                if cost > stock:
                    break
                cell = self.free_adjacent(b, front)
                if cell is None:
                    continue
                self._taken.add(cell)
                actions.append(produce(b.id, cell[0], cell[1], kind))
                stock -= cost

        # workers
        for u in workers:
            if u.verb is not None or u.id in busy:
                continue
            a = self._work(u, view, config, bases)
            if a is not None:
                actions.append(a)

        # army: gather until the wave is complete, defend home meanwhile
        soldiers = [u for u in own if u.kind in MILITARY_KINDS]
        if len(soldiers) >= self.wave_size:
            self.attacking = True
        elif 2 * len(soldiers) < self.wave_size:
            self.attacking = False
        army = [u for u in soldiers if u.verb is None]
        if army:
            if self.attacking:
                targets = self.enemy_targets()
            else:
                targets = [(e.x, e.y) for e in view.enemies if cheb(e, self.home) <= self.defend_radius]
            fld = None
            for u in army:
                a = self._strike(u, view, config)
                if a is None and (targets or cheb(u, self.rally) > 1):
                    if fld is None:
                        fld = self.field(targets or [self.rally])
                    a = self.step_toward(u, fld)
                if a is not None:
                    actions.append(a)
        self._last_moves = {a.unit: (a.x, a.y) for a in actions if a.verb == "move"}
        return actions

    def before_act(self, view: PlayerView, config: GameConfig) -> None:
        pass

    def _strike(self, u: UnitView, view: PlayerView, config: GameConfig) -> Optional[Action]:
        rng_ = config.units[u.kind].attack_range
        in_range = [e for e in view.enemies if cheb(u, e) <= rng_]
        if not in_range:
            return None
        t = min(in_range, key=lambda e: (e.kind not in MILITARY_KINDS, e.kind != "worker",
                                         e.hp, -self.target_preference(u, e), cheb(u, e), self.frame((e.x, e.y))))
        return attack(u.id, t.id)

    def _construct(self, view: PlayerView, workers: list[UnitView], busy: set[int]) -> Optional[Action]:
        site = self.build_site(view)
        if site is None:
            return None
        cands = [u for u in workers if u.verb is None and not u.cargo]
        if not cands:
            return None
        u = min(cands, key=lambda w: (abs(w.x - site[0]) + abs(w.y - site[1]), w.id))
        busy.add(u.id)
        if abs(u.x - site[0]) + abs(u.y - site[1]) == 1:
            self._taken.add(site)
            return build(u.id, site[0], site[1], "barracks")
        return self.step_toward(u, self.field([site]))

    def _work(self, u: UnitView, view: PlayerView, config: GameConfig, bases: list[UnitView]) -> Optional[Action]:
        for e in view.enemies:
            if e.kind in ("worker",) + MILITARY_KINDS and cheb(u, e) <= 1 and not u.cargo:
                return attack(u.id, e.id)
        if u.cargo:
            if not bases:
                return None
            for b in bases:
                if abs(b.x - u.x) + abs(b.y - u.y) == 1:
                    return deposit(u.id, b.id)
            return self.step_toward(u, self.field([(b.x, b.y) for b in bases]))
        res = self.resources()
        for dx, dy in self.dirs:
            c = (u.x + dx, u.y + dy)
            if c in view.resources:
                return harvest(u.id, *c)
        if not res:
            return None
        a = self.step_toward(u, self.field(res))
        if a is None:
            a = self._step_aside(u, bases)
        return a

    def _step_aside(self, u: UnitView, bases: list[UnitView]) -> Optional[Action]:
        """Clear the drop-off ring when there is nothing closer to walk to."""
        if not any(abs(b.x - u.x) + abs(b.y - u.y) == 1 for b in bases):
            return None
        for dx, dy in self.dirs:
            c = (u.x + dx, u.y + dy)
            if self.is_free(c) and not any(abs(b.x - c[0]) + abs(b.y - c[1]) == 1 for b in bases):
                self._taken.add(c)
                return move(u.id, *c)
        return None
