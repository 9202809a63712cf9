"""Calibration, tournaments and the command-line harness."""
from phantomrts.bench.calibrate import CalibrationError, calibrate_counters
from phantomrts.bench.tournament import (
    ScoreRow,
    ScoreTable,
    SpecError,
    TournamentResult,
    TournamentSpec,
    report,
    run_tournament,
)

__all__ = [
    "CalibrationError",
    "calibrate_counters",
    "ScoreRow",
    "ScoreTable",
    "SpecError",
    "TournamentResult",
    "TournamentSpec",
    "report",
    "run_tournament",
]
