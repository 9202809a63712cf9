"""Tournaments with mirrored starts, chaotic pairing and normalized scores."""
from __future__ import annotations

import csv
import io
import json
import os
import random
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from phantomrts.bots import BOTS, make_bot
from phantomrts.engine.config import GameConfig, randomize_config
from phantomrts.engine.game import Winner, derive_seed, run_game
from phantomrts.engine.gamemap import MapError, resolve_map

REPORT_VERSION = 1
CSV_COLUMNS = ("map", "bot1", "bot2", "games", "wins1", "draws", "wins2", "score1", "score2")
AGGREGATE = "ALL"


class SpecError(ValueError):
    pass


@dataclass
class TournamentSpec:
    """What to play.

    ``bot_params`` maps a bot name to constructor overrides; the phantom bot
    additionally receives ``k``, ``budget_ms``, ``max_iterations`` and ``phi``.
    ``config`` is a path to a GameConfig JSON file (default config if None).
    """

    maps: list[str]
    games_per_map: int
    bots: tuple[str, str]
    chaos: bool = False
    master_seed: int = 0
    k: int = 30
    budget_ms: Optional[float] = None
    max_iterations: Optional[int] = 40
    phi: str = "auto"
    config: Optional[str] = None
    bot_params: dict[str, dict[str, Any]] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.maps:
            raise SpecError("no maps given")
        if self.games_per_map <= 0:
            raise SpecError("games_per_map must be positive")
        if self.games_per_map % 2:
            raise SpecError("games_per_map must be even (half from each starting position)")
        if len(self.bots) != 2:
            raise SpecError("exactly two bots play a tournament")
        for b in self.bots:
            if b not in BOTS:
                raise SpecError(f"unknown bot {b!r}")
        if self.budget_ms is None and self.max_iterations is None:
            raise SpecError("need a time budget or an iteration cap for the solver")
        if self.phi not in ("auto", "neutral", "optimistic", "pessimistic"):
            raise SpecError(f"unknown phi policy {self.phi!r}")
        for m in self.maps:
            try:
                resolve_map(m)
            except (MapError, OSError) as exc:
                raise SpecError(f"map {m!r}: {exc}") from exc

    def base_config(self) -> GameConfig:
        return GameConfig.load(self.config) if self.config else GameConfig.default()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bots"] = list(self.bots)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TournamentSpec":
        d = dict(d)
        d["bots"] = tuple(d["bots"])
        d["maps"] = list(d["maps"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise SpecError(f"malformed tournament spec: {exc}") from exc


@dataclass(frozen=True)
class ScoreRow:
    map: str
    bot1: str
    bot2: str
    games: int
    wins1: int
    draws: int
    wins2: int

    @property
    def score1(self) -> float:
        return 100.0 * (self.wins1 + 0.5 * self.draws) / self.games if self.games else 0.0

    @property
    def score2(self) -> float:
        return 100.0 * (self.wins2 + 0.5 * self.draws) / self.games if self.games else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["score1"], d["score2"] = self.score1, self.score2
        return d


@dataclass
class ScoreTable:
    rows: list[ScoreRow]

    @property
    def aggregate(self) -> ScoreRow:
        if not self.rows:
            raise SpecError("empty score table")
        r0 = self.rows[0]
        return ScoreRow(AGGREGATE, r0.bot1, r0.bot2, sum(r.games for r in self.rows),
                        sum(r.wins1 for r in self.rows), sum(r.draws for r in self.rows),
                        sum(r.wins2 for r in self.rows))

    def row(self, map_name: str) -> ScoreRow:
        if map_name == AGGREGATE:
            return self.aggregate
        for r in self.rows:
            if r.map == map_name:
                return r
        raise KeyError(map_name)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows + [self.aggregate]:
            w.writerow([r.map, r.bot1, r.bot2, r.games, r.wins1, r.draws, r.wins2,
                        f"{r.score1:.4f}", f"{r.score2:.4f}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScoreTable":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            if rec["map"] == AGGREGATE:
                continue
            rows.append(ScoreRow(rec["map"], rec["bot1"], rec["bot2"], int(rec["games"]),
                                 int(rec["wins1"]), int(rec["draws"]), int(rec["wins2"])))
        return cls(rows)

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "aggregate": self.aggregate.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreTable":
        keys = ("map", "bot1", "bot2", "games", "wins1", "draws", "wins2")
        return cls([ScoreRow(**{k: r[k] for k in keys}) for r in d["rows"]])


@dataclass(frozen=True)
class GameTask:
    map_index: int
    map_name: str
    game_index: int
    seed: int
    a_seat: int  # 0 if bots[0] plays player 1
    config: dict
    bots: tuple[str, str]
    params: tuple[dict, dict]


@dataclass
class GameRecord:
    map_index: int
    map_name: str
    game_index: int
    seed: int
    a_seat: int
    config_digest: str
    winner: str
    ticks: int
    reason: str
    score_a: float
    bot_stats: dict = field(default_factory=dict)


def _bot_params(spec: TournamentSpec, name: str) -> dict:
    p = {}
    if name == "phantom":
        p.update(k=spec.k, budget_ms=spec.budget_ms, max_iterations=spec.max_iterations, phi=spec.phi)
    p.update(spec.bot_params.get(name, {}))
    return p


def pair_config(spec: TournamentSpec, base: GameConfig, map_index: int, pair_index: int) -> GameConfig:
    """Config shared by both games of a pair (re-randomized per pair in chaos mode)."""
    if not spec.chaos:
        return base
    return randomize_config(base, random.Random(derive_seed(spec.master_seed, map_index, pair_index, "chaos")))


def schedule(spec: TournamentSpec) -> list[GameTask]:
    """Every game of the tournament in report order.

    Games ``2j`` and ``2j + 1`` on a map form a pair: same seed, same config,
    starting positions swapped.
    """
    spec.validate()
    base = spec.base_config()
    params = (_bot_params(spec, spec.bots[0]), _bot_params(spec, spec.bots[1]))
    tasks = []
    for mi, m in enumerate(spec.maps):
        for j in range(spec.games_per_map // 2):
            cfg = pair_config(spec, base, mi, j).to_dict()
            seed = derive_seed(spec.master_seed, mi, j)
            for seat in (0, 1):
                tasks.append(GameTask(mi, m, 2 * j + seat, seed, seat, cfg, spec.bots, params))
    return tasks


def _collect(bot) -> dict:
    out = {}
    for attr in ("solve_ms", "production_log"):
        if hasattr(bot, attr):
            out[attr] = list(getattr(bot, attr))
    return out


def play_task(task: GameTask) -> GameRecord:
    gmap = resolve_map(task.map_name)
    config = GameConfig.from_dict(task.config)
    a = make_bot(task.bots[0], **task.params[0])
    b = make_bot(task.bots[1], **task.params[1])
    seats = (a, b) if task.a_seat == 0 else (b, a)
    outcome = run_game(seats[0], seats[1], gmap, config, task.seed)
    stats = {}
    if _collect(a):
        stats["a"] = _collect(a)
    if _collect(b):
        stats["b"] = _collect(b)
    return GameRecord(task.map_index, gmap.name, task.game_index, task.seed, task.a_seat, config.digest(),
                      outcome.winner.name.lower(), outcome.ticks_played, outcome.reason,
                      outcome.scores[task.a_seat], stats)


def score_table(spec: TournamentSpec, records: Sequence[GameRecord]) -> ScoreTable:
    rows = []
    for mi, m in enumerate(spec.maps):
        recs = [r for r in records if r.map_index == mi]
        wins_a = sum(1 for r in recs if r.score_a == 1.0)
        draws = sum(1 for r in recs if r.score_a == 0.5)
        name = recs[0].map_name if recs else Path(m).stem
        rows.append(ScoreRow(name, spec.bots[0], spec.bots[1], len(recs), wins_a, draws, len(recs) - wins_a - draws))
    return ScoreTable(rows)


@dataclass
class TournamentResult:
    spec: TournamentSpec
    table: ScoreTable
    records: list[GameRecord]


def run_tournament(spec: TournamentSpec, jobs: int = 1,
                   progress: Optional[Callable[[GameRecord], None]] = None) -> TournamentResult:
    """Play the whole schedule; results do not depend on ``jobs``."""
    tasks = schedule(spec)
    records: list[GameRecord] = []
    if jobs <= 1:
        for t in tasks:
            r = play_task(t)
            records.append(r)
            if progress:
                progress(r)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for r in pool.map(play_task, tasks, chunksize=1):
                records.append(r)
                if progress:
                    progress(r)
    records.sort(key=lambda r: (r.map_index, r.game_index))
    return TournamentResult(spec, score_table(spec, records), records)


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_json(result: TournamentResult) -> dict:
    spec = result.spec
    return {
        "version": REPORT_VERSION,
        "spec": spec.to_dict(),
        "master_seed": spec.master_seed,
        "config_hash": spec.base_config().digest(),
        "games": [{"map": r.map_name, "game": r.game_index, "seed": r.seed, "a_seat": r.a_seat,
                   "config": r.config_digest, "winner": r.winner, "ticks": r.ticks, "score_a": r.score_a}
                  for r in result.records],
        **result.table.to_dict(),
    }


def report(result: TournamentResult | ScoreTable, fmt: str, path: str | Path) -> Path:
    """Write a CSV or JSON report; nothing is left behind if writing fails."""
    if fmt == "csv":
        table = result if isinstance(result, ScoreTable) else result.table
        text = table.to_csv()
    elif fmt == "json":
        if isinstance(result, ScoreTable):
            text = json.dumps({"version": REPORT_VERSION, **result.to_dict()}, indent=2)
        else:
            text = json.dumps(report_json(result), indent=2)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    _atomic_write(path, text + ("" if text.endswith("\n") else "\n"))
    return Path(path)


def rerun_from_report(path: str | Path, jobs: int = 1) -> TournamentResult:
    with open(path) as fh:
        d = json.load(fh)
    return run_tournament(TournamentSpec.from_dict(d["spec"]), jobs=jobs)


def winner_name(w: Winner) -> str:
    return w.name.lower()
