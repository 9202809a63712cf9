"""Error function networks and a local-search solver for them.

A network is a set of integer variables with inclusive bounds and a set of
error functions. Each error function maps the values of its scope to a
non-negative real that is zero exactly when the values satisfy it.

:func:`solve` runs a steepest-descent local search with a per-variable tabu
list, bounded plateau moves and random restarts. It first drives the total
error to zero, then looks for feasible assignments with a higher objective.
The neighbourhood of an assignment is every single-variable re-assignment
plus every simultaneous +/-1 change of two variables; the latter is what lets
the search move along equality constraints without leaving feasibility.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from phantomrts import kernels

__all__ = [
    "ModelError",
    "Variable",
    "ErrorFunction",
    "linear_error",
    "ErrorFunctionNetwork",
    "SolveResult",
    "total_error",
    "solve",
]

Assignment = tuple[int, ...]

_SENSES = {"le": kernels.KIND_LE, "ge": kernels.KIND_GE, "eq": kernels.KIND_EQ}


class ModelError(ValueError):
    """Malformed network or assignment."""


@dataclass(frozen=True)
class Variable:
    id: int
    lower: int
    upper: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ModelError(f"variable {self.id}: lower {self.lower} > upper {self.upper}")


class ErrorFunction:
    """A non-negative function of the variables in ``scope``.

    ``fn`` receives one value per scope variable, in scope order.
    """

    linear: Optional[tuple[tuple[float, ...], float, str]] = None

    def __init__(self, scope: Sequence[int], fn: Callable[..., float], name: str = ""):
        self.scope = tuple(scope)
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "f")

    def eval(self, values: Sequence[int]) -> float:
        return self.fn(*values)

    def __repr__(self):
        return f"ErrorFunction({self.name!r}, scope={self.scope})"


def linear_error(scope: Sequence[int], coef: Sequence[float], rhs: float, sense: str, name: str = "") -> ErrorFunction:
    """Built-in linear error ``sum(coef * x)`` compared with ``rhs``.

    ``le``: max(0, s - rhs); ``ge``: max(0, rhs - s); ``eq``: |s - rhs|.
    """
    if sense not in _SENSES:
        raise ModelError(f"unknown sense {sense!r}")
    coef = tuple(float(c) for c in coef)
    if len(coef) != len(scope):
        raise ModelError("coefficient count does not match scope")
    rhs = float(rhs)

    def fn(*values):
        s = sum(c * v for c, v in zip(coef, values)) - rhs
        if sense == "le":
            return max(0.0, s)
        if sense == "ge":
            return max(0.0, -s)
        return abs(s)

    f = ErrorFunction(scope, fn, name or f"linear_{sense}")
    f.linear = (coef, rhs, sense)
    return f


class ErrorFunctionNetwork:
    def __init__(self, variables: Sequence[Variable], functions: Sequence[ErrorFunction]):
        if not variables:
            raise ModelError("a network needs at least one variable")
        ids = [v.id for v in variables]
        if ids != list(range(len(variables))):
            raise ModelError("variable ids must be contiguous from 0 in order")
        for f in functions:
            for i in f.scope:
                if not 0 <= i < len(variables):
                    raise ModelError(f"{f!r} references unknown variable {i}")
        self.variables = list(variables)
        self.functions = list(functions)
        self.lower = np.array([v.lower for v in variables], dtype=np.int64)
        self.upper = np.array([v.upper for v in variables], dtype=np.int64)
        self._linear = self._compile_linear()

    @property
    def size(self) -> int:
        return len(self.variables)

    def _compile_linear(self):
        if not self.functions or any(f.linear is None for f in self.functions):
            return None
        coef = np.zeros((len(self.functions), self.size))
        rhs = np.zeros(len(self.functions))
        kind = np.zeros(len(self.functions), dtype=np.int32)
        for r, f in enumerate(self.functions):
            c, b, sense = f.linear
            for i, ci in zip(f.scope, c):
                coef[r, i] += ci
            rhs[r] = b
            kind[r] = _SENSES[sense]
        return coef, rhs, kind

    def check(self, a: Sequence[int]) -> None:
        if len(a) != self.size:
            raise ModelError(f"assignment has {len(a)} values for {self.size} variables")
        for v, x in zip(self.variables, a):
            if not v.lower <= x <= v.upper:
                raise ModelError(f"variable {v.id} = {x} outside [{v.lower}, {v.upper}]")

    def function_errors(self, a: Sequence[int]) -> list[float]:
        out = []
        for f in self.functions:
            e = float(f.eval([a[i] for i in f.scope]))
            if not (e >= 0.0 and math.isfinite(e)):
                raise ModelError(f"{f!r} returned {e}; error functions must be finite and non-negative")
            out.append(e)
        return out

    def errors(self, cands: np.ndarray) -> np.ndarray:
        """Total error of every row of ``cands`` (assumed in-domain)."""
        if self._linear is not None:
            return kernels.linear_errors(cands, *self._linear)
        if not self.functions:
            return np.zeros(len(cands))
        return np.array([sum(self.function_errors(row)) for row in cands.tolist()], dtype=np.float64)


@dataclass
class SolveResult:
    assignment: Assignment
    total_error: float
    objective: float
    feasible: bool
    iterations: int


def total_error(network: ErrorFunctionNetwork, a: Sequence[int]) -> float:
    network.check(a)
    return math.fsum(network.function_errors(a))


class _Neighbourhood:
    """Move generator for one network; candidate rows plus the variables each touches."""

    def __init__(self, network: ErrorFunctionNetwork):
        lo, hi = network.lower, network.upper
        n = network.size
        self.lo, self.hi = lo, hi
        self.var = np.concatenate([np.full(hi[i] - lo[i] + 1, i, dtype=np.int64) for i in range(n)])
        self.val = np.concatenate([np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(n)])
        pairs = []
        for i, j in combinations(range(n), 2):
            for si in (-1, 1):
                for sj in (-1, 1):
                    pairs.append((i, j, si, sj))
        pairs = np.array(pairs, dtype=np.int64).reshape(-1, 4)
        self.pi, self.pj = pairs[:, 0], pairs[:, 1]
        self.delta = np.zeros((len(pairs), n), dtype=np.int64)
        rows = np.arange(len(pairs))
        self.delta[rows, self.pi] = pairs[:, 2]
        self.delta[rows, self.pj] = pairs[:, 3]
        self._single_rows = np.arange(len(self.var))

    def __call__(self, a: np.ndarray):
        keep = self.val != a[self.var]
        single = np.repeat(a[None, :], len(self.var), axis=0)
        single[self._single_rows, self.var] = self.val
        single = single[keep]
        t1s = self.var[keep]
        paired = a[None, :] + self.delta
        ok = ((paired >= self.lo) & (paired <= self.hi)).all(axis=1)
        cands = np.concatenate([single, paired[ok]])
        t1 = np.concatenate([t1s, self.pi[ok]])
        t2 = np.concatenate([t1s, self.pj[ok]])
        return cands, t1, t2


class _Objective:
    """Memoizing adapter over a scalar objective, with optional batch fast path."""

    def __init__(self, fn):
        self.fn = fn
        self.batch_fn = getattr(fn, "batch", None)
        self.cache: dict[Assignment, float] = {}

    def one(self, a: np.ndarray) -> float:
        if self.batch_fn is not None:
            return float(self.batch_fn(a[None, :])[0])
        key = tuple(a.tolist())
        v = self.cache.get(key)
        if v is None:
            v = float(self.fn(key))
            if not math.isfinite(v):
                raise ModelError(f"objective returned {v} on {key}")
            self.cache[key] = v
        return v

    def many(self, cands: np.ndarray) -> np.ndarray:
        if self.batch_fn is not None:
            return np.asarray(self.batch_fn(cands), dtype=np.float64)
        return np.array([self.one(row) for row in cands])


def _pick(rng: random.Random, idx: np.ndarray) -> int:
    return int(idx[rng.randrange(len(idx))]) if len(idx) > 1 else int(idx[0])


def solve(
    network: ErrorFunctionNetwork,
    objective: Optional[Callable[[Assignment], float]] = None,
    budget_ms: Optional[float] = 100.0,
    rng: random.Random | int | None = None,
    *,
    max_iterations: Optional[int] = None,
    tabu_tenure: Optional[int] = None,
    plateau_limit: int = 8,
    initial: Optional[Sequence[int]] = None,
) -> SolveResult:
    """Search for a zero-error assignment maximizing ``objective``.

    The search stops at the wall-clock deadline ``budget_ms`` or after
    ``max_iterations`` neighbourhood scans, whichever comes first; pass
    ``budget_ms=None`` with an iteration cap for fully deterministic runs.
    With no objective the search stops at the first feasible assignment.
    """
    if budget_ms is None and max_iterations is None:
        raise ValueError("need a wall-clock budget or an iteration cap")
    if budget_ms is not None and budget_ms <= 0:
        raise ValueError("budget_ms must be positive")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)

    deadline = None if budget_ms is None else time.perf_counter() + budget_ms / 1000.0
    n = network.size
    lo, hi = network.lower, network.upper
    tenure = max(1, n // 4) if tabu_tenure is None else tabu_tenure
    neighbours = _Neighbourhood(network)
    obj = _Objective(objective) if objective is not None else None

    def random_assignment():
        return np.array([rng.randint(int(l), int(h)) for l, h in zip(lo, hi)], dtype=np.int64)

    if initial is not None:
        network.check(initial)
        cur = np.array(initial, dtype=np.int64)
    else:
        cur = lo.copy()
    cur_err = float(network.errors(cur[None, :])[0])
    cur_obj = obj.one(cur) if (obj is not None and cur_err == 0.0) else None

    best_err, best_err_a = cur_err, cur.copy()
    best_obj, best_obj_a = (cur_obj, cur.copy()) if cur_obj is not None else (None, None)
    if cur_err == 0.0 and obj is None:
        return SolveResult(tuple(cur.tolist()), 0.0, 0.0, True, 0)

    tabu_until = np.zeros(n, dtype=np.int64)
    plateau = 0
    step = 0
    while True:
        if max_iterations is not None and step >= max_iterations:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        step += 1
        cands, t1, t2 = neighbours(cur)
        if len(cands) == 0:  # every domain is a single value
            break
        errs = network.errors(cands)
        free = (tabu_until[t1] <= step) & (tabu_until[t2] <= step)
        moved_to = None

        if cur_err > 0.0:
            allowed = free | (errs < best_err)
            if not allowed.any():
                allowed = np.ones(len(cands), dtype=bool)
            m = errs[allowed].min()
            ties = np.flatnonzero(allowed & (errs == m))
            if m < cur_err or (m == cur_err and plateau < plateau_limit):
                plateau = 0 if m < cur_err else plateau + 1
                moved_to = _pick(rng, ties)
                cur_err = float(m)
        else:
            feas = np.flatnonzero(errs == 0.0)
            if len(feas):
                vals = obj.many(cands[feas])
                allowed = free[feas] | (vals > best_obj)
                if allowed.any():
                    m = vals[allowed].max()
                    if m > cur_obj or (m == cur_obj and plateau < plateau_limit):
                        plateau = 0 if m > cur_obj else plateau + 1
                        moved_to = int(feas[_pick(rng, np.flatnonzero(allowed & (vals == m)))])
                        cur_obj = float(m)

        if moved_to is None:
            cur = random_assignment()
            cur_err = float(network.errors(cur[None, :])[0])
            cur_obj = None
            tabu_until[:] = 0
            plateau = 0
        else:
            tabu_until[t1[moved_to]] = step + tenure
            tabu_until[t2[moved_to]] = step + tenure
            cur = cands[moved_to].copy()

        if cur_err == 0.0 and cur_obj is None:
            if obj is None:
                return SolveResult(tuple(cur.tolist()), 0.0, 0.0, True, step)
            cur_obj = obj.one(cur)
        if cur_err < best_err:
            best_err, best_err_a = cur_err, cur.copy()
        if cur_obj is not None and (best_obj is None or cur_obj > best_obj):
            best_obj, best_obj_a = cur_obj, cur.copy()

    if best_obj_a is not None:
        return SolveResult(tuple(best_obj_a.tolist()), 0.0, float(best_obj), True, step)
    value = obj.one(best_err_a) if obj is not None else 0.0
    return SolveResult(tuple(best_err_a.tolist()), float(best_err), value, False, step)
