import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phantomrts.rdu import (
    NEUTRAL,
    Neutral,
    Optimistic,
    Pessimistic,
    decision_weights,
    deform,
    estimate_preference,
    kind_from_name,
    rdu_lottery,
    rdu_samples,
)

KINDS = [Neutral(), Optimistic(), Pessimistic()]

# 40-digit mpmath evaluations of the normalized shifted logistic (lambda 10, shift 1.3)
PESS_065 = 0.5004548108190112025439678628305553101051
PESS_050_TIMES_10 = 0.4746696497914198830977519340030482355703
PESS_1234 = 1.929400352360315158263068394044468639735
OPT_03 = 0.8265398944611893611145710619049399169059

utility = st.floats(-1e3, 1e3, allow_nan=False)


@st.composite
def lotteries(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    us = draw(st.lists(utility, min_size=n, max_size=n))
    ws = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    total = math.fsum(ws)
    ps = [w / total for w in ws]
    ps[-1] = 1.0 - math.fsum(ps[:-1])
    return list(zip(us, ps))


class TestDeform:
    def test_neutral_identity(self):
        assert deform(NEUTRAL, 0.37) == 0.37

    def test_pessimistic_raw_midpoint(self):
        assert Pessimistic().raw(0.65) == pytest.approx(0.5, abs=1e-15)

    def test_pessimistic_normalized_against_high_precision(self):
        assert deform(Pessimistic(), 0.65) == pytest.approx(PESS_065, abs=1e-14)

    def test_optimistic_logit(self):
        assert deform(Optimistic(), 0.3) == pytest.approx(OPT_03, abs=1e-14)
        assert deform(Optimistic(), 1.0) == 1.0

    def test_optimistic_clamped_near_zero(self):
        assert Optimistic()(5e-5) == 0.0
        assert Optimistic()(2e-4) > 0.0

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
    def test_exact_endpoints(self, kind):
        assert deform(kind, 0.0) == 0.0
        assert deform(kind, 1.0) == 1.0

    @pytest.mark.parametrize("p", [-0.01, 1.01, float("nan")])
    def test_outside_unit_interval(self, p):
        with pytest.raises(ValueError):
            deform(NEUTRAL, p)

    def test_bad_lambda(self):
        with pytest.raises(ValueError):
            Optimistic(lam=0)
        with pytest.raises(ValueError):
            Pessimistic(lam=-1)

    def test_names(self):
        assert isinstance(kind_from_name("Pessimistic"), Pessimistic)
        with pytest.raises(ValueError):
            kind_from_name("bold")

    def test_shapes(self):
        for p in (0.1, 0.3, 0.5, 0.7, 0.9):
            assert Optimistic()(p) > p
        # the shifted logistic only crosses the diagonal near p = 0.7
        for p in (0.1, 0.3, 0.5, 0.6):
            assert Pessimistic()(p) < p


class TestLottery:
    def test_degenerate(self):
        for kind in KINDS:
            assert rdu_lottery([(7.5, 1.0)], kind) == 7.5

    def test_two_outcomes_neutral(self):
        assert rdu_lottery([(0, 0.5), (10, 0.5)]) == 5.0

    def test_two_outcomes_pessimistic(self):
        assert rdu_lottery([(10, 0.5), (0, 0.5)], Pessimistic()) == pytest.approx(PESS_050_TIMES_10, abs=1e-13)

    def test_empty(self):
        with pytest.raises(ValueError):
            rdu_lottery([])

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError):
            rdu_lottery([(1, 0.5), (2, 0.4)])

    @settings(max_examples=300)
    @given(lotteries())
    def test_neutral_is_expected_utility(self, lot):
        eu = math.fsum(u * p for u, p in lot)
        assert rdu_lottery(lot) == pytest.approx(eu, abs=1e-9)

    @settings(max_examples=300)
    @given(lotteries(), st.sampled_from(KINDS))
    def test_bounds(self, lot, kind):
        us = [u for u, _ in lot]
        v = rdu_lottery(lot, kind)
        assert min(us) - 1e-9 <= v <= max(us) + 1e-9

    @settings(max_examples=300)
    @given(lotteries(), st.sampled_from(KINDS), st.floats(-100, 100))
    def test_translation(self, lot, kind, c):
        shifted = [(u + c, p) for u, p in lot]
        assert rdu_lottery(shifted, kind) == pytest.approx(rdu_lottery(lot, kind) + c, abs=1e-9)

    @settings(max_examples=300)
    @given(lotteries(), st.sampled_from(KINDS), st.floats(0.01, 100))
    def test_positive_scaling(self, lot, kind, c):
        scaled = [(u * c, p) for u, p in lot]
        assert rdu_lottery(scaled, kind) == pytest.approx(c * rdu_lottery(lot, kind), rel=1e-9, abs=1e-9)

    @settings(max_examples=200)
    @given(lotteries())
    def test_ordering_under_dominated_deformations(self, lot):
        concave = rdu_lottery(lot, lambda p: p * p)
        convex = rdu_lottery(lot, math.sqrt)
        assert concave <= rdu_lottery(lot) + 1e-9 <= convex + 2e-9

    @settings(max_examples=200)
    @given(lotteries(), st.sampled_from(KINDS), st.randoms(use_true_random=False))
    def test_order_of_entries_irrelevant(self, lot, kind, r):
        shuffled = list(lot)
        r.shuffle(shuffled)
        assert rdu_lottery(shuffled, kind) == pytest.approx(rdu_lottery(lot, kind), abs=1e-9)

    def test_tied_utilities_contribute_nothing(self):
        base = [(1.0, 0.2), (3.0, 0.5), (3.0, 0.3)]
        merged = [(1.0, 0.2), (3.0, 0.8)]
        for kind in KINDS:
            assert rdu_lottery(base, kind) == pytest.approx(rdu_lottery(merged, kind), abs=1e-12)


class TestSamples:
    def test_constant(self):
        for kind in KINDS:
            assert rdu_samples([4, 4, 4], kind) == 4

    def test_two_samples(self):
        assert rdu_samples([10, 0]) == 5

    def test_pessimistic_four_samples(self):
        v = rdu_samples([4, 2, 1, 3], Pessimistic())
        assert v == pytest.approx(PESS_1234, abs=1e-13)
        assert v == pytest.approx(rdu_lottery([(u, 0.25) for u in (1, 2, 3, 4)], Pessimistic()), abs=1e-12)

    def test_empty(self):
        with pytest.raises(ValueError):
            rdu_samples([])

    @settings(max_examples=300)
    @given(st.lists(utility, min_size=1, max_size=12), st.sampled_from(KINDS))
    def test_matches_uniform_lottery(self, xs, kind):
        k = len(xs)
        lot = [(x, 1.0 / k) for x in xs]
        assert rdu_samples(xs, kind) == pytest.approx(rdu_lottery(lot, kind), abs=1e-12, rel=1e-12)

    @settings(max_examples=200)
    @given(st.lists(utility, min_size=1, max_size=12), st.sampled_from(KINDS))
    def test_decision_weights(self, xs, kind):
        w = decision_weights(len(xs), kind)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert (w >= -1e-15).all()
        assert float(w @ sorted(xs)) == pytest.approx(rdu_samples(xs, kind), abs=1e-9)


class TestEstimatePreference:
    def test_constant_utility(self):
        v = estimate_preference(None, lambda r: r.random(), lambda d, s: 2.0, 30, Pessimistic(), random.Random(0))
        assert v == 2.0

    def test_alternating_sampler(self):
        seq = iter([0, 1])
        v = estimate_preference(None, lambda r: next(seq), lambda d, s: 10.0 * s, 2, NEUTRAL, random.Random(0))
        assert v == 5

    def test_seeded(self):
        args = (3, lambda r: r.gauss(0, 1), lambda d, s: d * s, 30, Optimistic())
        assert estimate_preference(*args, random.Random(9)) == estimate_preference(*args, random.Random(9))

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            estimate_preference(None, lambda r: 0, lambda d, s: 0, 0, NEUTRAL, random.Random(0))

    def test_sampler_failure_propagates(self):
        def broken(rng):
            raise RuntimeError("no model")

        with pytest.raises(RuntimeError):
            estimate_preference(None, broken, lambda d, s: 0, 3, NEUTRAL, random.Random(0))
