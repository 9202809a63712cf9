import hashlib
import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phantomrts.bots import make_bot
from phantomrts.engine import (
    Action,
    ConfigError,
    GameConfig,
    MapError,
    Winner,
    advance,
    attack,
    builtin_map,
    chebyshev,
    harvest,
    initial_state,
    move,
    parse_map,
    player_view,
    produce,
    randomize_config,
    run_game,
    step,
)
from phantomrts.engine.core import DIRS4, GameState

CFG = GameConfig.default()

OPEN = """8 3
........
........
........
"""


def arena(config=CFG, text=OPEN):
    gmap = parse_map(text + "", "arena") if "A" in text or "a" in text else None
    if gmap is None:
        gmap = parse_map(text.replace("........\n", "a......b\n", 1), "arena")
    st_ = initial_state(gmap, config)
    # clear the placeholder workers
    for i in list(st_.entities):
        e = st_.entities.pop(i)
        st_.occupied.pop((e.x, e.y))
    return st_


class RandomBot:
    """Issues arbitrary (often invalid) orders for its own units."""

    def act(self, view, config, rng):
        out = []
        for u in view.own:
            if rng.random() < 0.4:
                continue
            verb = rng.choice(["move", "attack", "harvest", "return", "produce", "build"])
            dx, dy = rng.choice(DIRS4)
            x, y = u.x + dx, u.y + dy
            if verb == "attack" and view.enemies:
                out.append(attack(u.id, rng.choice(view.enemies).id))
            elif verb == "return":
                bases = [b.id for b in view.own if b.kind == "base"]
                out.append(Action(u.id, "return", target=bases[0] if bases else -1))
            elif verb in ("produce", "build"):
                out.append(Action(u.id, verb, x, y, what=rng.choice(["worker", "light", "heavy", "ranged", "barracks"])))
            else:
                out.append(Action(u.id, verb, x, y))
        return out


class TestMaps:
    def test_builtin_maps(self):
        for name, size in (("bases8x8", (8, 8)), ("bases16x16", (16, 16)), ("nowheretorun9x8", (9, 8))):
            m = builtin_map(name)
            assert (m.width, m.height) == size
            assert m.start(0) != m.start(1)

    def test_round_trip(self):
        m = builtin_map("bases16x16")
        again = parse_map(m.to_text(), m.name)
        assert again == m

    def test_resource_amounts(self):
        m = parse_map("3 1\na9b\n")
        assert m.resources == {(1, 0): 45}

    @pytest.mark.parametrize("text", ["", "x y\n", "2 1\nab.\n", "2 2\nab\n", "65 1\n" + "." * 65 + "\n",
                                      "2 1\na?\n", "2 1\na.\n"])
    def test_rejects(self, text):
        with pytest.raises(MapError):
            parse_map(text)

    def test_unknown_builtin(self):
        with pytest.raises(MapError):
            builtin_map("atlantis")


class TestConfig:
    def test_default_invariants(self):
        assert CFG.units["ranged"].attack_range > 1
        assert all(CFG.units[k].attack_range == 1 for k in ("worker", "light", "heavy"))
        assert CFG.carry in (1, 2)

    def test_round_trip(self, tmp_path):
        p = tmp_path / "cfg.json"
        CFG.save(p)
        assert GameConfig.load(p) == CFG
        assert GameConfig.load(p).digest() == CFG.digest()

    @pytest.mark.parametrize("path,value", [("units.light.hp", 0), ("worker.carry", 3), ("units.light.attack_range", 2),
                                            ("units.ranged.attack_range", 1)])
    def test_invalid(self, path, value):
        with pytest.raises(ConfigError):
            CFG.with_values({path: value})

    def test_unknown_attribute(self):
        with pytest.raises(ConfigError):
            CFG.with_values({"units.light.speed": 2})

    def test_collapsed_ranges(self):
        d = CFG.to_dict()
        flat = CFG.flat()
        d["chaos"] = {k: [flat[k], flat[k]] for k in d["chaos"]}
        base = GameConfig.from_dict(d)
        assert randomize_config(base, random.Random(5)).digest() == base.digest()

    def test_randomize_deterministic_and_in_range(self):
        a = randomize_config(CFG, random.Random(17))
        b = randomize_config(CFG, random.Random(17))
        assert a == b
        flat = a.flat()
        for path, (lo, hi) in CFG.chaos.items():
            assert lo <= flat[path] <= hi

    def test_carry_frequency(self):
        twos = sum(randomize_config(CFG, random.Random(s)).carry == 2 for s in range(10_000))
        assert abs(twos / 10_000 - 0.5) <= 0.015


class TestStep:
    def test_move_conflict_cancels_both(self):
        st_ = arena()
        a = st_.add_entity(0, "light", 2, 1, CFG)
        b = st_.add_entity(1, "light", 4, 1, CFG)
        after = step(st_, {0: [move(a.id, 3, 1)], 1: [move(b.id, 3, 1)]}, CFG)
        for _ in range(3):
            after = step(after, {}, CFG)
        assert (after.entities[a.id].x, after.entities[b.id].x) == (2, 4)
        assert any("cell conflict" in e for e in step(st_, {0: [move(a.id, 3, 1)], 1: [move(b.id, 3, 1)]}, CFG).errors)

    def test_mutual_kill(self):
        st_ = arena()
        a = st_.add_entity(0, "heavy", 2, 1, CFG)
        b = st_.add_entity(1, "heavy", 3, 1, CFG)
        cfg = CFG.with_values({"units.heavy.damage": 6})
        cur = st_
        cur = step(cur, {0: [attack(a.id, b.id)], 1: [attack(b.id, a.id)]}, cfg)
        for _ in range(cfg.units["heavy"].attack_ticks - 1):
            cur = step(cur, {}, cfg)
        assert a.id not in cur.entities and b.id not in cur.entities
        assert cur.alive(0) == cur.alive(1) == 0

    def test_harvest_duration(self):
        cfg = CFG.with_values({"worker.harvest_ticks": 10})
        gmap = parse_map("4 1\na9.b\n")
        st_ = initial_state(gmap, cfg)
        w = next(e for e in st_.entities.values() if e.owner == 0)
        cur = advance(st_, {0: [harvest(w.id, 1, 0)]}, cfg)
        for t in range(1, 11):
            assert cur.entities[w.id].cargo == (1 if t == 10 else 0), t
            if t < 10:
                cur = advance(cur, {}, cfg)

    def test_step_is_pure(self):
        st_ = initial_state(builtin_map("bases8x8"), CFG)
        before = st_.digest()
        w = next(e for e in st_.entities.values() if e.kind == "worker" and e.owner == 0)
        step(st_, {0: [move(w.id, w.x + 1, w.y)]}, CFG)
        assert st_.digest() == before

    def test_malformed_actions_ignored(self):
        st_ = initial_state(builtin_map("bases8x8"), CFG)
        after = step(st_, {0: [("junk",), Action(999, "move", 0, 0), Action(0, "dance")]}, CFG)
        assert len(after.errors) == 3
        assert after.tick == 1

    def test_production_charges_stock(self):
        st_ = initial_state(builtin_map("bases8x8"), CFG)
        base = next(e for e in st_.entities.values() if e.kind == "base" and e.owner == 0)
        x, y = next((base.x + dx, base.y + dy) for dx, dy in DIRS4 if st_.is_free(base.x + dx, base.y + dy))
        cur = step(st_, {0: [produce(base.id, x, y, "worker")]}, CFG)
        assert cur.stock[0] == st_.stock[0] - CFG.cost("worker")
        for _ in range(CFG.units["worker"].train_ticks):
            cur = step(cur, {}, CFG)
        assert sum(e.kind == "worker" and e.owner == 0 for e in cur.entities.values()) == 2

    def test_insufficient_stock(self):
        st_ = initial_state(builtin_map("bases8x8"), CFG.with_values({"starting_resources": 0}))
        base = next(e for e in st_.entities.values() if e.kind == "base" and e.owner == 0)
        x, y = next((base.x + dx, base.y + dy) for dx, dy in DIRS4 if st_.is_free(base.x + dx, base.y + dy))
        cur = step(st_, {0: [produce(base.id, x, y, "worker")]}, CFG)
        assert any("insufficient stock" in e for e in cur.errors)


class TestView:
    def test_sight_boundary(self):
        st_ = arena()
        r = CFG.units["light"].sight_range
        me = st_.add_entity(0, "light", 0, 1, CFG)
        near = st_.add_entity(1, "light", r, 1, CFG)
        far = st_.add_entity(1, "light", r + 1, 0, CFG)
        v = player_view(st_, 0, CFG)
        ids = {e.id for e in v.enemies}
        assert near.id in ids and far.id not in ids
        assert [u.id for u in v.own] == [me.id]

    def test_enemy_details_hidden(self):
        st_ = initial_state(builtin_map("bases8x8"), CFG)
        v = player_view(st_, 0, CFG)
        assert all(e.verb is None and e.cargo == 0 for e in v.enemies)


class TestRunGame:
    def test_no_entities_wins_at_zero(self):
        gmap = builtin_map("bases8x8")
        st_ = initial_state(gmap, CFG)
        for i in [i for i, e in st_.entities.items() if e.owner == 1]:
            e = st_.entities.pop(i)
            st_.occupied.pop((e.x, e.y))
        out = run_game(make_bot("pass"), make_bot("pass"), gmap, CFG, 0, state=st_)
        assert out.winner is Winner.PLAYER1 and out.ticks_played == 0

    def test_pass_bots_draw(self):
        cfg = CFG.with_values({"max_game_ticks": 50})
        out = run_game(make_bot("pass"), make_bot("pass"), builtin_map("bases8x8"), cfg, 3)
        assert out.winner is Winner.DRAW and out.ticks_played == 50
        assert sum(out.scores) == 1.0

    def test_identical_traces(self):
        digests = []
        for _ in range(2):
            buf = io.StringIO()
            run_game(make_bot("baseline"), make_bot("rush"), builtin_map("bases8x8"), CFG, 11, trace=buf)
            digests.append(hashlib.sha256(buf.getvalue().encode()).hexdigest())
        assert digests[0] == digests[1]

    def test_crashing_bot_loses(self):
        class Broken:
            def act(self, view, config, rng):
                raise RuntimeError("boom")

        buf = io.StringIO()
        out = run_game(make_bot("pass"), Broken(), builtin_map("bases8x8"), CFG, 0, trace=buf)
        assert out.winner is Winner.PLAYER1 and "crashed" in out.reason
        assert "crashed" in buf.getvalue().splitlines()[-1]


class Recorder:
    """Wraps a bot and checks every view it receives against the true state."""

    def __init__(self, bot, holder, player):
        self.bot, self.holder, self.player = bot, holder, player

    def act(self, view, config, rng):
        st_ = self.holder[0]
        own = [e for e in st_.entities.values() if e.owner == self.player]
        for en in view.enemies:
            assert any(chebyshev(o.x, o.y, en.x, en.y) <= config.sight(o.kind) for o in own)
        true_own = {e.id for e in own}
        assert {u.id for u in view.own} == true_own
        return self.bot.act(view, config, rng)


def play_checked(bots, gmap, config, seed, ticks):
    st_ = initial_state(gmap, config)
    holder = [st_]
    wrapped = [Recorder(b, holder, p) for p, b in enumerate(bots)]
    rngs = [random.Random(seed * 2 + p) for p in (0, 1)]
    total = st_.total_resources()
    for _ in range(ticks):
        if not (st_.alive(0) and st_.alive(1)):
            break
        before = {i: (e.x, e.y) for i, e in st_.entities.items()}
        acts = {p: wrapped[p].act(player_view(st_, p, config), config, rngs[p]) for p in (0, 1)}
        advance(st_, acts, config)
        assert st_.total_resources() == total
        for i, e in st_.entities.items():
            if i in before:
                assert abs(e.x - before[i][0]) + abs(e.y - before[i][1]) <= 1
            assert e.hp <= config.max_hp(e.kind)
        cells = [(e.x, e.y) for e in st_.entities.values()]
        assert len(cells) == len(set(cells))
    return st_


class TestInvariants:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6), st.sampled_from(["bases8x8", "bases16x16", "nowheretorun9x8"]))
    def test_random_play(self, seed, name):
        play_checked([RandomBot(), RandomBot()], builtin_map(name), CFG, seed, 150)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 10**6))
    def test_scripted_play_chaos(self, seed):
        cfg = randomize_config(CFG, random.Random(seed))
        play_checked([make_bot("baseline"), make_bot("rush")], builtin_map("bases8x8"), cfg, seed, 400)

    def test_scripted_play_fixed(self):
        play_checked([make_bot("phantom", budget_ms=None, max_iterations=20), make_bot("baseline")],
                     builtin_map("bases16x16"), CFG, 1, 600)

    def test_state_copy_independent(self):
        st_ = initial_state(builtin_map("bases8x8"), CFG)
        cp = st_.copy()
        next(iter(cp.entities.values())).hp = -5
        assert isinstance(cp, GameState) and st_.digest() != cp.digest()
