import io
import random
from collections import Counter

import pytest

from phantomrts import belief as bel
from phantomrts.bots import BaselineBot, PhantomBot, RushBot, make_bot
from phantomrts.engine import GameConfig, Winner, builtin_map, initial_state, player_view, run_game
from phantomrts.upp import MILITARY_NAMES, CounterMatrix

CFG = GameConfig.default()


def phantom(**kw):
    kw.setdefault("budget_ms", None)
    kw.setdefault("max_iterations", 100)
    return make_bot("phantom", **kw)


class Gate:
    """Keeps a bot's unit production switched off until ``at``."""

    def __init__(self, bot, at):
        self.bot, self.at = bot, at

    def act(self, view, config, rng):
        self.bot.produce_units = view.tick >= self.at
        return self.bot.act(view, config, rng)


class TestRegistry:
    def test_names(self):
        assert isinstance(make_bot("phantom"), PhantomBot)
        assert isinstance(make_bot("rush"), RushBot)
        assert isinstance(make_bot("baseline"), BaselineBot)

    def test_unknown(self):
        with pytest.raises(ValueError):
            make_bot("oracle")


class TestRush:
    @pytest.mark.parametrize("seed", [0, 9])
    def test_beats_pass(self, seed):
        out = run_game(make_bot("rush"), make_bot("pass"), builtin_map("bases8x8"), CFG, seed)
        assert out.winner is Winner.PLAYER1 and out.ticks_played < CFG.max_game_ticks

    def test_harvests_at_tick_zero(self):
        st = initial_state(builtin_map("bases8x8"), CFG)
        acts = make_bot("rush").act(player_view(st, 0, CFG), CFG, random.Random(0))
        assert any(a.verb in ("harvest", "move") and st.entities[a.unit].kind == "worker" for a in acts)

    def test_only_light(self):
        bot = RushBot()
        assert bot.production(None, CFG, random.Random(0), [None] * 3, 100) == ["light"] * 3


class TestBaseline:
    def test_uniform_choice(self):
        bot = BaselineBot()
        rng = random.Random(2024)
        counts = Counter()
        for _ in range(30_000):
            counts.update(bot.production(None, CFG, rng, [None], 100))
        for k in MILITARY_NAMES:
            assert abs(counts[k] / 30_000 - 1 / 3) <= 0.01

    def test_nothing_affordable(self):
        assert BaselineBot().production(None, CFG, random.Random(0), [None] * 2, 1) == []

    def test_respects_stock(self):
        got = BaselineBot().production(None, CFG, random.Random(3), [None] * 5, 5)
        assert sum(CFG.cost(k) for k in got) <= 5


def traced(bot1, bot2, seed, mapname="bases8x8", ticks=300):
    buf = io.StringIO()
    cfg = CFG.with_values({"max_game_ticks": ticks})
    run_game(bot1, bot2, builtin_map(mapname), cfg, seed, trace=buf)
    return buf.getvalue()


class TestPhantom:
    @pytest.mark.parametrize("mapname", ["bases8x8", "bases16x16"])
    def test_same_script_as_baseline(self, mapname):
        for seed in (1, 2):
            a = traced(phantom(produce_units=False), make_bot("rush"), seed, mapname)
            b = traced(make_bot("baseline", produce_units=False), make_bot("rush"), seed, mapname)
            assert a == b

    def test_no_barracks_economy_only(self):
        st = initial_state(builtin_map("bases8x8"), CFG)
        bot = phantom()
        acts = bot.act(player_view(st, 0, CFG), CFG, random.Random(0))
        assert bot.production_log == []
        assert all(a.what not in MILITARY_NAMES for a in acts)

    def test_opener_small_map(self):
        cfg = CFG.with_values({"max_game_ticks": 400})
        fastest = min(MILITARY_NAMES, key=lambda k: (CFG.units[k].train_ticks, MILITARY_NAMES.index(k)))
        for seed in range(3):
            bot = phantom(opener=True)
            run_game(bot, make_bot("pass"), builtin_map("bases8x8"), cfg, seed)
            trained = [k for e in bot.production_log for k in e["orders"]]
            assert trained[:2] == [fastest, fastest]

    def test_opener_off_on_large_map(self):
        bot = phantom(opener=True)
        st = initial_state(builtin_map("bases16x16"), CFG)
        bot.act(player_view(st, 0, CFG), CFG, random.Random(0))
        assert bot.opener_left == 0

    def test_anti_light_majority(self):
        # the enemy shows nothing but light units for 200 ticks, then we may train
        cfg = CFG.with_values({"max_game_ticks": 260})
        heavy_majority = 0
        total = Counter()
        for seed in range(20):
            gmap = builtin_map("bases16x16")
            st = initial_state(gmap, CFG)
            base = next(e for e in st.entities.values() if e.owner == 0 and e.kind == "base")
            for dx in (2, 3, 4):
                st.add_entity(0, "barracks", base.x + dx, base.y + 3, CFG)
            for i in range(5):
                st.add_entity(1, "light", base.x + 1 + i, base.y + 6, CFG)
            st.stock[0] = 0
            bot = phantom()
            run_game(Gate(bot, 200), make_bot("pass"), gmap, cfg, seed, state=st)
            c = Counter(k for e in bot.production_log for k in e["orders"])
            total += c
            heavy_majority += 2 * c["heavy"] > sum(c.values())
        counter = max(range(3), key=lambda a: CounterMatrix.default()[a, 0])
        assert MILITARY_NAMES[counter] == "heavy"
        assert heavy_majority > 10
        assert 2 * total["heavy"] > sum(total.values())

    @pytest.mark.parametrize("opponent,mapname", [("baseline", "bases8x8"), ("rush", "bases16x16"),
                                                  ("baseline", "bases16x16")])
    def test_orders_feasible(self, opponent, mapname):
        bot = phantom(opener=True)
        run_game(bot, make_bot(opponent), builtin_map(mapname), CFG, 5)
        assert bot.production_log
        for e in bot.production_log:
            cost = dict(zip(MILITARY_NAMES, e["cost"]))
            assert sum(cost[k] for k in e["orders"]) <= e["stock"]
            assert len(e["orders"]) <= e["idle_barracks"]
            if e["feasible"] and not e["opener"]:
                for a in range(3):
                    assert sum(e["assign"][a]) == e["produce"][a] + e["possess"][a]
            elif not e["feasible"]:
                assert e["orders"] == []

    def test_phi_matches_ledgers(self):
        bot = phantom()
        run_game(bot, make_bot("rush"), builtin_map("bases8x8"), CFG, 3)
        bot2 = phantom()
        run_game(bot2, make_bot("baseline"), builtin_map("bases16x16"), CFG, 4)
        kinds = set()
        for e in bot.production_log + bot2.production_log:
            b = bel.BeliefState(destroyed_enemy_cost=e["destroyed_enemy_cost"],
                                destroyed_own_cost=e["destroyed_own_cost"])
            assert bel.select_phi(b, e["cheapest"]).name == e["kind"]
            kinds.add(e["kind"])
        assert len(kinds) >= 2

    def test_fixed_phi(self):
        bot = phantom(phi="optimistic")
        run_game(bot, make_bot("baseline"), builtin_map("bases8x8"), CFG, 0)
        assert {e["kind"] for e in bot.production_log} == {"optimistic"}

    def test_acts_only_for_own_units(self):
        class Check:
            def __init__(self, bot):
                self.bot = bot

            def act(self, view, config, rng):
                acts = self.bot.act(view, config, rng)
                own = {u.id for u in view.own}
                assert all(a.unit in own for a in acts)
                return acts

        out = run_game(Check(phantom()), Check(make_bot("rush")), builtin_map("bases8x8"), CFG, 8)
        assert "crashed" not in out.reason
