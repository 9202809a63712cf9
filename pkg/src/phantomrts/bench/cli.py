"""Command-line entry point: calibrate, tournament, play, solve."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from phantomrts.bench.calibrate import CalibrationError, calibrate_counters
from phantomrts.bench.tournament import SpecError, TournamentSpec, report, run_tournament
from phantomrts.bots import BOTS, make_bot
from phantomrts.efn import ErrorFunctionNetwork, ModelError, Variable, linear_error, solve
from phantomrts.engine.config import ConfigError, GameConfig, randomize_config
from phantomrts.engine.game import derive_seed, run_game
from phantomrts.engine.gamemap import MapError, resolve_map
from phantomrts.rdu import kind_from_name
from phantomrts.upp import CounterMatrix, ProductionState, decide_production

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3
PHI_CHOICES = ("neutral", "optimistic", "pessimistic", "auto")

log = logging.getLogger("phantomrts")


class ValidationError(ValueError):
    pass


def _config(path: Optional[str]) -> GameConfig:
    return GameConfig.load(path) if path else GameConfig.default()


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_calibrate(args) -> int:
    cfg = _config(args.config)
    m = calibrate_counters(cfg, args.skirmishes, random.Random(args.seed))
    doc = {"version": 1, "skirmishes": args.skirmishes, "seed": args.seed, "config": cfg.digest(),
           "counters": [[round(x, 4) for x in row] for row in m.tolist()], "cyclic": m.is_cyclic()}
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _spec_from_args(args) -> TournamentSpec:
    if args.spec:
        with open(args.spec) as fh:
            d = json.load(fh)
        spec = TournamentSpec.from_dict(d.get("spec", d))
    else:
        bots = tuple(args.bots.split(","))
        if len(bots) != 2:
            raise ValidationError("--bots takes two comma-separated names")
        spec = TournamentSpec(maps=args.maps.split(","), games_per_map=args.games, bots=bots, chaos=args.chaos,
                              master_seed=args.seed, k=args.k, budget_ms=args.budget_ms,
                              max_iterations=args.iterations, phi=args.phi, config=args.config)
    spec.validate()
    return spec


def cmd_tournament(args) -> int:
    spec = _spec_from_args(args)
    result = run_tournament(spec, jobs=args.jobs)
    if args.out:
        report(result, args.format, args.out)
    else:
        sys.stdout.write(result.table.to_csv() if args.format == "csv" else
                         json.dumps(result.table.to_dict(), indent=2) + "\n")
    return EXIT_OK


def _bot_kwargs(name: str, args) -> dict:
    if name != "phantom":
        return {}
    return {"k": args.k, "budget_ms": args.budget_ms, "max_iterations": args.iterations, "phi": args.phi}


def cmd_play(args) -> int:
    names = args.bots.split(",")
    if len(names) != 2:
        raise ValidationError("--bots takes two comma-separated names")
    gmap = resolve_map(args.maps.split(",")[0])
    cfg = _config(args.config)
    if args.chaos:
        cfg = randomize_config(cfg, random.Random(derive_seed(args.seed, "chaos")))
    bots = [make_bot(n, **_bot_kwargs(n, args)) for n in names]
    out = Path(args.out) if args.out else None
    if out:
        with open(out, "w") as fh:
            outcome = run_game(bots[0], bots[1], gmap, cfg, args.seed, trace=fh)
        digest = hashlib.sha256(out.read_bytes()).hexdigest()
    else:
        outcome = run_game(bots[0], bots[1], gmap, cfg, args.seed)
        digest = None
    doc = {"map": gmap.name, "seed": args.seed, "bots": names, **outcome.to_dict()}
    if digest:
        doc["trace_sha256"] = digest
    sys.stdout.write(json.dumps(doc) + "\n")
    return EXIT_OK


def _solve_upp(d: dict, args) -> dict:
    counters = CounterMatrix(d["counters"]) if "counters" in d else CounterMatrix.default()
    try:
        state = ProductionState(int(d["stock"]), int(d["idle_barracks"]), tuple(d.get("possess", (0, 0, 0))),
                                tuple(d["cost"]), counters, int(d.get("domain_max", 20)))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed UPP instance: {exc}") from exc
    samples = d.get("samples") or [d.get("enemy", (0, 0, 0))]
    samples = [tuple(int(v) for v in s) for s in samples]
    phi = args.phi if args.phi != "auto" else d.get("phi", "neutral")
    k = len(samples) if "samples" in d else args.k
    counter = iter(range(1 << 62))

    def sampler(_rng):
        # the given compositions, in order, are the decision's samples
        return samples[next(counter) % len(samples)]

    plan = decide_production(state, sampler, kind_from_name(phi), k, args.budget_ms, random.Random(args.seed),
                             max_iterations=args.iterations)
    out = plan.to_dict()
    out["phi"] = phi
    return out


def _solve_efn(d: dict, args) -> dict:
    try:
        variables = [Variable(i, int(lo), int(hi)) for i, (lo, hi) in enumerate(d["variables"])]
        funcs = []
        for c in d.get("constraints", ()):
            scope = c.get("scope", list(range(len(c["coef"]))))
            funcs.append(linear_error(scope, c["coef"], c["rhs"], c["sense"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed network: {exc}") from exc
    net = ErrorFunctionNetwork(variables, funcs)
    objective = None
    if "objective" in d:
        w = np.asarray(d["objective"], dtype=np.float64)

        class Linear:
            def batch(self, cands):
                return cands @ w

            def __call__(self, a):
                return float(np.dot(w, a))

        objective = Linear()
    res = solve(net, objective, args.budget_ms, random.Random(args.seed), max_iterations=args.iterations)
    return {"assignment": list(res.assignment), "total_error": res.total_error, "objective": res.objective,
            "feasible": res.feasible, "iterations": res.iterations}


def cmd_solve(args) -> int:
    try:
        with open(args.instance) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{args.instance}: not JSON ({exc})") from exc
    out = _solve_efn(d, args) if "variables" in d else _solve_upp(d, args)
    _write(json.dumps(out) + "\n", args.out)
    return EXIT_OK


def _budget(text: str) -> Optional[float]:
    if text.lower() in ("none", "off"):
        return None
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("budget must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--k", type=int, default=30, help="enemy samples per production decision")
    common.add_argument("--budget-ms", type=_budget, default=None,
                        help="solver wall-clock budget; 'none' runs the iteration cap only")
    common.add_argument("--iterations", type=int, default=40, help="solver iteration cap")
    common.add_argument("--phi", choices=PHI_CHOICES, default="auto")
    common.add_argument("--config", help="GameConfig JSON (default: shipped reference config)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="phantomrts", description="RTS unit-production experiments")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", parents=[common], help="estimate the counter matrix")
    c.add_argument("--skirmishes", type=int, default=200)
    c.set_defaults(func=cmd_calibrate)

    t = sub.add_parser("tournament", parents=[common], help="run a tournament and write a report")
    t.add_argument("--spec", help="tournament spec JSON (or a JSON report to re-run)")
    t.add_argument("--maps", default="bases8x8,bases16x16")
    t.add_argument("--games", type=int, default=100, help="games per map (even)")
    t.add_argument("--bots", default="phantom,baseline")
    t.add_argument("--chaos", action="store_true")
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--format", choices=("csv", "json"), default="json")
    t.set_defaults(func=cmd_tournament)

    g = sub.add_parser("play", parents=[common], help="play one game, optionally writing a trace")
    g.add_argument("--maps", default="bases8x8")
    g.add_argument("--bots", default="phantom,baseline")
    g.add_argument("--chaos", action="store_true")
    g.set_defaults(func=cmd_play)

    s = sub.add_parser("solve", parents=[common], help="solve one UPP instance or error function network")
    s.add_argument("instance", help="instance JSON")
    s.set_defaults(func=cmd_solve)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    for name in getattr(args, "bots", "").split(",") if hasattr(args, "bots") and args.bots else ():
        if name not in BOTS:
            parser.error(f"unknown bot {name!r}")
    try:
        return args.func(args)
    except (ValidationError, SpecError, ConfigError, MapError, ModelError, CalibrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
