"""The Unit Production Problem as an error function network.

Variable layout (12 variables): ``0..2`` are the units to produce
(light, heavy, ranged); ``3 + 3*a + b`` is how many units of type ``a`` are
assigned against enemy type ``b``.

Counter constants are stored in potency form: ``counters[a][b]`` is how many
``b`` units one ``a`` unit is worth against, the reciprocal of "how many ``a``
are needed to beat one ``b``".
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import IntEnum
from importlib import resources
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from phantomrts import kernels
from phantomrts.efn import ErrorFunctionNetwork, SolveResult, Variable, linear_error, solve
from phantomrts.rdu import NEUTRAL, decision_weights

ENEMY_CAP = 200


class MilitaryType(IntEnum):
    LIGHT = 0
    HEAVY = 1
    RANGED = 2

    @property
    def unit(self) -> str:
        return self.name.lower()


MILITARY_NAMES = tuple(t.unit for t in MilitaryType)


class CounterMatrix:
    """3x3 potency matrix indexed ``[attacker][defender]`` in (l, h, r) order."""

    def __init__(self, rows: Sequence[Sequence[float]]):
        m = np.array(rows, dtype=np.float64)
        if m.shape != (3, 3):
            raise ValueError("counter matrix must be 3x3")
        if not ((m > 0) & (m <= 5)).all():
            raise ValueError("counter entries must lie in (0, 5]")
        self._m = m
        self._m.setflags(write=False)

    def __getitem__(self, ab):
        a, b = ab
        return float(self._m[a, b])

    @property
    def array(self) -> np.ndarray:
        return self._m

    def tolist(self) -> list[list[float]]:
        return self._m.tolist()

    def is_cyclic(self) -> bool:
        """Heavy beats light, light beats ranged, ranged beats heavy."""
        L, H, R = MilitaryType
        m = self._m
        return bool(m[H, L] > m[L, H] and m[L, R] > m[R, L] and m[R, H] > m[H, R])

    def __eq__(self, other):
        return isinstance(other, CounterMatrix) and np.array_equal(self._m, other._m)

    def __repr__(self):
        return f"CounterMatrix({self.tolist()})"

    @classmethod
    def default(cls) -> "CounterMatrix":
        """Matrix calibrated on the reference game configuration."""
        text = resources.files("phantomrts").joinpath("data/counters_default.json").read_text()
        return cls(json.loads(text)["counters"])


class EnemyComposition(NamedTuple):
    light: int = 0
    heavy: int = 0
    ranged: int = 0


@dataclass
class ProductionState:
    stock: int
    idle_barracks: int
    possess: tuple[int, int, int]
    cost: tuple[int, int, int]
    counters: CounterMatrix
    domain_max: int = 20

    def __post_init__(self):
        if self.domain_max < 1:
            raise ValueError("domain_max must be at least 1")
        if min(self.cost) <= 0:
            raise ValueError("unit costs must be positive")
        if self.stock < 0 or self.idle_barracks < 0 or min(self.possess) < 0:
            raise ValueError("stock, barracks and possessed units must be non-negative")


@dataclass
class ProductionPlan:
    produce: tuple[int, int, int]
    assign: tuple[tuple[int, int, int], ...]
    objective_value: float
    feasible: bool
    iterations: int = 0
    samples: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "produce": list(self.produce),
            "assign": [list(r) for r in self.assign],
            "objective": self.objective_value,
            "feasible": self.feasible,
            "iterations": self.iterations,
        }


def produce_index(a: int) -> int:
    return a


def assign_index(a: int, b: int) -> int:
    return 3 + 3 * a + b


def build_network(state: ProductionState) -> ErrorFunctionNetwork:
    variables = [Variable(i, 0, state.domain_max) for i in range(12)]
    functions = [linear_error((0, 1, 2), state.cost, state.stock, "le", "stock")]
    for a in range(3):
        scope = (assign_index(a, 0), assign_index(a, 1), assign_index(a, 2), produce_index(a))
        functions.append(linear_error(scope, (1, 1, 1, -1), state.possess[a], "eq", f"link_{MILITARY_NAMES[a]}"))
    functions.append(linear_error((0, 1, 2), (1, 1, 1), state.idle_barracks, "le", "barracks"))
    return ErrorFunctionNetwork(variables, functions)


def reg(x: float) -> float:
    return -(x * x + 1.0) if x < 0 else x


def aim(b: int, assign: Sequence[Sequence[int]], counters: CounterMatrix, s: Sequence[int]) -> float:
    return min(1.0, sum(assign[a][b] * counters[a, b] for a in range(3)) - s[b])


def decode_assign(a: Sequence[int]) -> tuple[tuple[int, int, int], ...]:
    return tuple(tuple(int(a[assign_index(i, j)]) for j in range(3)) for i in range(3))


def objective(a: Sequence[int], state: ProductionState, s: Sequence[int]) -> float:
    assign = decode_assign(a)
    return sum(reg(aim(b, assign, state.counters, s)) for b in range(3))


class RDUObjective:
    """RDU of the UPP objective over a fixed set of enemy samples.

    Exposes ``batch`` so the solver can score whole neighbourhoods with the
    compiled kernel.
    """

    def __init__(self, state: ProductionState, samples: Sequence[Sequence[int]], kind: Callable[[float], float] = NEUTRAL):
        self.state = state
        self.samples = np.array(samples, dtype=np.float64).reshape(-1, 3)
        if len(self.samples) == 0:
            raise ValueError("need at least one enemy sample")
        self.weights = decision_weights(len(self.samples), kind)
        self.counters = state.counters.array.ravel()

    def batch(self, cands: np.ndarray) -> np.ndarray:
        return kernels.upp_rdu(cands[:, 3:12], self.counters, self.samples, self.weights)

    def __call__(self, a: Sequence[int]) -> float:
        return float(self.batch(np.asarray(a, dtype=np.int64)[None, :])[0])


def draw_samples(sampler: Callable[[random.Random], Sequence[int]], k: int, seed: int) -> list[EnemyComposition]:
    """The ``k`` samples one preference estimate sees for a given seed."""
    srng = random.Random(seed)
    out = []
    for _ in range(k):
        s = sampler(srng)
        out.append(EnemyComposition(*(min(ENEMY_CAP, int(v)) for v in s)))
    return out


def plan_from_result(result: SolveResult, samples=()) -> ProductionPlan:
    a = result.assignment
    if not result.feasible:
        return ProductionPlan((0, 0, 0), decode_assign(a), result.objective, False, result.iterations, list(samples))
    return ProductionPlan(tuple(a[:3]), decode_assign(a), result.objective, True, result.iterations, list(samples))


def decide_production(
    state: ProductionState,
    sampler: Callable[[random.Random], Sequence[int]],
    kind: Callable[[float], float] = NEUTRAL,
    k: int = 30,
    budget_ms: Optional[float] = 100.0,
    rng: random.Random | int | None = None,
    *,
    max_iterations: Optional[int] = None,
) -> ProductionPlan:
    """Solve one production decision.

    Every candidate plan is scored against the same ``k`` enemy compositions
    drawn from ``sampler``, which is what the preference estimate yields when
    it is re-seeded identically for each candidate.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    sample_seed = rng.getrandbits(64)
    solver_seed = rng.getrandbits(64)
    samples = draw_samples(sampler, k, sample_seed)
    network = build_network(state)
    result = solve(network, RDUObjective(state, samples, kind), budget_ms, random.Random(solver_seed),
                   max_iterations=max_iterations)
    return plan_from_result(result, samples)
