import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ared.core import ConstraintParams, Domain, VariableRange
from ared.errors import DrawExhausted, EmptyArchive
from ared.sampling import (
    FeedbackCenter,
    constraint_threshold,
    draw_constrained,
    draw_point,
    exploratory_spec,
    feedback_spec,
    min_distance,
)
from conftest import make_samples


class TestExploratorySpec:
    def test_unit_range(self, unit_domain):
        spec = exploratory_spec(unit_domain)
        assert spec.mu == (0.5,)
        assert spec.sigma == (0.25,)
        assert spec.truncation == ((0.0, 1.0),)

    def test_symmetric_range(self):
        d = Domain([VariableRange("x", -3.0, 3.0)], "y")
        spec = exploratory_spec(d)
        assert spec.mu == (0.0,)
        assert spec.sigma == (1.5,)

    def test_axes_independent(self):
        d = Domain(
            [VariableRange("a", 0.0, 1.0), VariableRange("b", -3.0, 3.0)], "y"
        )
        spec = exploratory_spec(d)
        assert spec.mu == (0.5, 0.0)
        assert spec.sigma == (0.25, 1.5)


class TestFeedbackSpec:
    def test_centered(self, unit_domain):
        spec = feedback_spec(unit_domain, FeedbackCenter((0.5,), 20.0))
        assert spec.mu == (0.5,)
        assert spec.sigma == (0.1,)
        assert spec.truncation[0] == pytest.approx((0.3, 0.7))

    def test_clipped_at_boundary(self, unit_domain):
        spec = feedback_spec(unit_domain, FeedbackCenter((0.05,), 20.0))
        assert spec.truncation[0] == pytest.approx((0.0, 0.25))

    def test_square_domain_box(self, square_domain):
        spec = feedback_spec(square_domain, FeedbackCenter((0.0, 0.0), 15.0))
        assert spec.sigma == pytest.approx((0.6, 0.6))
        for lo, hi in spec.truncation:
            assert (lo, hi) == pytest.approx((-1.2, 1.2))
        # the +/-2 sigma box is 40% of each axis, i.e. 16% of the area
        frac = np.prod([(hi - lo) / r.length()
                        for (lo, hi), r in zip(spec.truncation, square_domain.ivs)])
        assert frac == pytest.approx(0.16)


class TestDrawPoint:
    def test_ten_thousand_draws_in_domain_with_centered_mean(self, unit_domain, rng):
        spec = exploratory_spec(unit_domain)
        draws = np.array([draw_point(spec, rng)[0] for _ in range(10_000)])
        assert np.all((draws >= 0.0) & (draws <= 1.0))
        assert abs(draws.mean() - 0.5) < 0.01

    def test_degenerate_sigma_concentrates_on_mu(self, unit_domain, rng):
        from ared.sampling import NormalDrawSpec

        spec = NormalDrawSpec((0.3,), (1e-9,), ((0.0, 1.0),))
        for _ in range(100):
            assert draw_point(spec, rng)[0] == pytest.approx(0.3, abs=1e-6)

    def test_fixed_seed_reproduces_sequence(self, unit_domain):
        spec = exploratory_spec(unit_domain)
        a = [draw_point(spec, np.random.default_rng(99))[0] for _ in range(1)]
        b = [draw_point(spec, np.random.default_rng(99))[0] for _ in range(1)]
        seq1 = np.random.default_rng(5)
        seq2 = np.random.default_rng(5)
        xs1 = [draw_point(spec, seq1)[0] for _ in range(50)]
        xs2 = [draw_point(spec, seq2)[0] for _ in range(50)]
        assert a == b
        assert xs1 == xs2

    def test_exhaustion_raises(self, rng):
        from ared.sampling import NormalDrawSpec

        # truncation sliver 20 sigma away from mu: practically unreachable
        spec = NormalDrawSpec((0.0,), (0.01,), ((0.2, 0.200001),))
        with pytest.raises(DrawExhausted):
            draw_point(spec, rng, max_attempts=50)


class TestConstraintThreshold:
    def test_first_draw_one_iv(self):
        assert constraint_threshold(1.0, 0, ConstraintParams(0.7, 10.0)) == pytest.approx(0.1)

    def test_tenth_draw(self):
        assert constraint_threshold(1.0, 10, ConstraintParams(0.7, 10.0)) == pytest.approx(1 / 17)

    def test_two_iv_diagonal(self):
        assert constraint_threshold(
            math.sqrt(2.0), 0, ConstraintParams(0.4, 5.0)
        ) == pytest.approx(math.sqrt(2.0) / 5.0)

    @given(st.integers(min_value=0, max_value=200))
    def test_strictly_decreasing_for_positive_p(self, v):
        p = ConstraintParams(0.7, 10.0)
        assert constraint_threshold(1.0, v + 1, p) < constraint_threshold(1.0, v, p)

    @given(st.integers(min_value=0, max_value=200))
    def test_constant_for_zero_p(self, v):
        p = ConstraintParams(0.0, 10.0)
        assert constraint_threshold(1.0, v, p) == 0.1


class TestMinDistance:
    def test_midpoint(self, unit_domain):
        archive = make_samples([((0.0,), 0.0), ((1.0,), 1.0)])
        assert min_distance([0.5], archive, unit_domain) == pytest.approx(0.5)

    def test_coincident_is_zero(self, unit_domain):
        archive = make_samples([((0.3,), 0.0)])
        assert min_distance([0.3], archive, unit_domain) == 0.0

    def test_center_to_corners_normalized(self, square_domain):
        corners = make_samples(
            [((-3.0, -3.0), 0), ((-3.0, 3.0), 0), ((3.0, -3.0), 0), ((3.0, 3.0), 0)]
        )
        d = min_distance([0.0, 0.0], corners, square_domain)
        assert d == pytest.approx(math.sqrt(0.5))

    def test_empty_archive_raises(self, unit_domain):
        with pytest.raises(EmptyArchive):
            min_distance([0.5], [], unit_domain)


class TestDrawConstrained:
    def test_accepted_point_clears_threshold(self, unit_domain):
        archive = make_samples([((0.0,), 0.0), ((1.0,), 1.0)])
        rng = np.random.default_rng(3)
        spec = exploratory_spec(unit_domain)
        draw = draw_constrained(
            spec, archive, 0, ConstraintParams(0.7, 10.0), unit_domain, rng
        )
        assert draw.nearest_distance > 0.1
        assert draw.threshold == pytest.approx(0.1)
        d_replay = min_distance(draw.coords, archive, unit_domain)
        assert d_replay == pytest.approx(draw.nearest_distance)

    def test_dense_archive_exhausts(self, unit_domain):
        # 21 points spaced 0.05 apart: no spot is > 1/11 ~ 0.0909 from all
        archive = make_samples([((x,), 0.0) for x in np.linspace(0, 1, 21)])
        rng = np.random.default_rng(4)
        with pytest.raises(DrawExhausted):
            draw_constrained(
                spec=exploratory_spec(unit_domain),
                archive=archive,
                v=2,
                params=ConstraintParams(0.7, 10.0),
                domain=unit_domain,
                rng=rng,
                max_attempts=500,
            )

    def test_thousand_accepted_draws_all_satisfy_constraint(self, square_domain):
        rng = np.random.default_rng(8)
        params = ConstraintParams(0.4, 5.0)
        spec = exploratory_spec(square_domain)
        archive = make_samples(
            [((-3.0, -3.0), 0), ((-3.0, 3.0), 0), ((3.0, -3.0), 0), ((3.0, 3.0), 0)]
        )
        L = square_domain.diagonal()
        for v in range(1000):
            draw = draw_constrained(spec, archive, v, params, square_domain, rng)
            replay = min_distance(draw.coords, archive, square_domain)
            assert replay > constraint_threshold(L, v, params)
            assert square_domain.contains(draw.coords)

    def test_feedback_draws_stay_in_clipped_box(self, square_domain):
        rng = np.random.default_rng(21)
        center = FeedbackCenter((2.8, -0.5), 30.0)
        spec = feedback_spec(square_domain, center)
        archive = make_samples(
            [((-3.0, -3.0), 0), ((-3.0, 3.0), 0), ((3.0, -3.0), 0), ((3.0, 3.0), 0)]
        )
        for v in range(200):
            draw = draw_constrained(
                spec, archive, v + 50, ConstraintParams(0.5, 7.0), square_domain, rng
            )
            for c, (lo, hi) in zip(draw.coords, spec.truncation):
                assert lo <= c <= hi
