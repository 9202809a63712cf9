"""Deterministic tick-based RTS simulation."""
from phantomrts.engine.config import (
    BUILDING_KINDS,
    MILITARY_KINDS,
    UNIT_KINDS,
    BuildingStats,
    ConfigError,
    GameConfig,
    UnitStats,
    randomize_config,
)
from phantomrts.engine.core import (
    Action,
    Death,
    Entity,
    GameState,
    PlayerView,
    UnitView,
    advance,
    attack,
    build,
    chebyshev,
    deposit,
    harvest,
    initial_state,
    move,
    player_view,
    produce,
    step,
)
from phantomrts.engine.game import BotPolicy, Outcome, Winner, derive_seed, run_game
from phantomrts.engine.gamemap import GameMap, MapError, builtin_map, load_map, parse_map, resolve_map
