import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mopkit as mk
from mopkit.exceptions import ConstructionError, DomainError, ValidationError
from mopkit.weights import MarkovRatio, Weight

LN2 = 0.6931471805599453
LN_5_3 = 0.5108256237659907


def test_interval_validation():
    with pytest.raises(ConstructionError):
        mk.Interval(1.0, 1.0)
    with pytest.raises(ConstructionError):
        mk.Interval(0.0, np.inf)
    iv = mk.Interval(-1.0, 2.0)
    assert iv.length == 3.0 and iv.mid == 0.5


def test_spec_validation():
    with pytest.raises(ValidationError):
        mk.WeightSpec.jacobi(-1, 1, -1.0, 0.0)
    with pytest.raises(ValidationError):
        mk.WeightSpec("chebyshev", mk.Interval(0, 1))


def test_weight_zero_outside_support():
    w = Weight.from_spec(mk.WeightSpec.constant(-1, 1))
    assert w.values(2.0) == 0.0
    assert np.all(w.values(np.asarray([-3.0, 3.0])) == 0.0)
    assert w.log_values(2.0) == -np.inf


class TestStieltjesTransform:
    def test_log2_plus(self):
        v = Weight.from_spec(mk.WeightSpec.constant(-2.0, -1.0))
        assert mk.stieltjes_transform(v, 0.0, "plus") == pytest.approx(LN2, abs=1e-12)

    def test_markov_decay(self):
        v = Weight.from_spec(mk.WeightSpec.constant(-2.0, -1.0))
        big = 1e6
        val = mk.stieltjes_transform(v, big, "plus")
        assert abs(val) < 1e-5
        assert big * val == pytest.approx(1.0, abs=1e-5)  # total mass of v

    def test_log2_minus_right_interval(self):
        v = Weight.from_spec(mk.WeightSpec.constant(1.0, 2.0))
        assert mk.stieltjes_transform(v, 0.0, "minus") == pytest.approx(LN2, abs=1e-12)

    def test_inside_support_rejected(self):
        v = Weight.from_spec(mk.WeightSpec.constant(-1.0, 1.0))
        for x in (0.0, -1.0, 1.0):
            with pytest.raises(DomainError):
                mk.stieltjes_transform(v, x, "plus")

    def test_monotone_off_support(self):
        # derivative has a fixed sign on each side of the support
        v = Weight.from_spec(mk.WeightSpec.jacobi(-1.0, 1.0, 0.5, 0.5))
        for xs in (np.linspace(1.2, 4.0, 9), np.linspace(-4.0, -1.2, 9)):
            vals = [mk.stieltjes_transform(v, x, "plus") for x in xs]
            diffs = np.diff(vals)
            assert np.all(diffs < 0.0) or np.all(diffs > 0.0)


class TestBuildAngelesco:
    def test_small_gap(self):
        ws = mk.build_angelesco([mk.WeightSpec.constant(-1.0, 0.0),
                                 mk.WeightSpec.constant(0.01, 1.0)])
        assert ws.p == 2 and ws.kind == "angelesco"

    def test_overlap_rejected(self):
        with pytest.raises(ConstructionError):
            mk.build_angelesco([mk.WeightSpec.constant(-1.0, 0.5),
                                mk.WeightSpec.constant(0.0, 1.0)])

    def test_reordering(self):
        ws = mk.build_angelesco([mk.WeightSpec.jacobi(1.0, 2.0, 0.5, 0.5),
                                 mk.WeightSpec.jacobi(-2.0, -1.0, 0.0, 0.0)])
        assert ws.intervals[0].a == -2.0 and ws.intervals[1].a == 1.0


class TestBuildNikishin:
    def test_two_weights_value(self, nikishin_ws):
        # w_2(1.5) = log(2.5 / 1.5) for the unit generator on [-1, 0]
        assert nikishin_ws.weights[1].values(1.5) == pytest.approx(LN_5_3, abs=1e-12)

    def test_same_interval_rejected(self):
        with pytest.raises(ConstructionError):
            mk.build_nikishin(mk.WeightSpec.constant(0.0, 1.0),
                              [mk.WeightSpec.constant(0.0, 1.0)])

    def test_three_weights_positive_ratios(self):
        ws = mk.build_nikishin(
            mk.WeightSpec.constant(3.0, 4.0),
            [mk.WeightSpec.constant(1.0, 2.0), mk.WeightSpec.constant(-1.0, 0.0)],
        )
        assert ws.p == 3
        xs = np.linspace(3.001, 3.999, 101)
        w1 = ws.weights[0].values(xs)
        for j in (1, 2):
            ratios = ws.weights[j].values(xs) / w1
            assert np.all(ratios > 0.0)

    def test_mirrored_orientation(self):
        # Gamma_2 to the right: minus sign keeps the ratio positive
        ws = mk.build_nikishin(mk.WeightSpec.constant(-2.0, -1.0),
                               [mk.WeightSpec.constant(0.0, 1.0)])
        xs = np.linspace(-1.999, -1.001, 51)
        assert np.all(ws.weights[1].values(xs) > 0.0)


def test_markov_ratio_matches_direct():
    v = Weight.from_spec(mk.WeightSpec.jacobi(-1.0, 0.0, 0.5, 0.0))
    ratio = MarkovRatio(v, mk.Interval(1.0, 2.0), 1)
    rng = np.random.default_rng(1)
    for x in 1.0 + rng.random(5):
        direct = mk.stieltjes_transform(v, x, "plus", tol=1e-13)
        assert ratio(np.asarray([x]))[0] == pytest.approx(direct, abs=1e-12)


class TestMoments:
    def test_legendre_small(self, legendre_ws):
        row = mk.moments(legendre_ws, 1, 2)
        assert row[0] == pytest.approx(2.0, abs=1e-13)
        assert row[1] == pytest.approx(0.0, abs=1e-13)
        assert row[2] == pytest.approx(2.0 / 3.0, abs=1e-13)

    def test_arcsine_mass(self):
        ws = mk.build_angelesco([mk.WeightSpec.jacobi(-1.0, 1.0, -0.5, -0.5)])
        row = mk.moments(ws, 1, 0)
        assert row[0] == pytest.approx(np.pi, abs=1e-10)

    def test_even_weight_odd_moments_vanish(self):
        ws = mk.build_angelesco([mk.WeightSpec.jacobi(-1.0, 1.0, 0.5, 0.5)])
        row = mk.moments(ws, 1, 7)
        assert np.all(np.abs(row[1::2]) < 1e-12)

    def test_tolerance_consistency(self, nikishin_ws):
        loose = mk.moments(nikishin_ws, 2, 6, tol=1e-8)
        tight = mk.moments(nikishin_ws, 2, 6, tol=1e-9)
        assert np.all(np.abs(loose - tight) <= 1e-8)

    def test_index_range(self, legendre_ws):
        with pytest.raises(ValidationError):
            mk.moments(legendre_ws, 2, 3)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(min_value=0.1, max_value=10.0))
    def test_scaling(self, c):
        base = Weight.from_spec(mk.WeightSpec.constant(-1.0, 1.0))
        ws = mk.WeightSystem.general([base])
        ws_scaled = mk.WeightSystem.general([base.scaled(c)])
        row = mk.moments(ws, 1, 4)
        row_scaled = mk.moments(ws_scaled, 1, 4)
        assert np.allclose(row_scaled, c * row, atol=1e-12 * max(1.0, c))


def test_moment_table_fields(angelesco_ws):
    mt = mk.moment_table(angelesco_ws, 6)
    assert mt.k_max == 6 and mt.p == 2
    assert mt.hull.a == -1.0 and mt.hull.b == 1.0
    # scaled moments on the hull coincide with raw ones here (hull is [-1,1])
    assert np.allclose(mt.scaled, mt.raw, atol=1e-12)
    # constant weights admit exact rational moments
    assert mt.exact[0] is not None
    assert float(mt.exact[0][1]) == pytest.approx(mt.raw[0, 1], abs=1e-12)


def test_exp_poly_weight():
    w = Weight.from_spec(mk.WeightSpec.exp_poly(0.0, 1.0, [0.0, 1.0]))
    ws = mk.WeightSystem.general([w])
    # integral of exp(-x) on [0, 1]
    assert mk.moments(ws, 1, 0)[0] == pytest.approx(1.0 - np.exp(-1.0), abs=1e-13)
    assert w.values(0.5) == pytest.approx(np.exp(-0.5), abs=1e-15)
    assert w.log_values(0.5) == pytest.approx(-0.5, abs=1e-15)


def test_exp_poly_even_weight_mop():
    # exp(-x^2) on a symmetric interval: degree-1 MOP is x
    ws = mk.WeightSystem.general(
        [Weight.from_spec(mk.WeightSpec.exp_poly(-1.0, 1.0, [0.0, 0.0, 1.0]))])
    mt = mk.moment_table(ws, 4)
    P = mk.type2_mop(mt, (1,))
    assert np.allclose(P.coeffs, [0.0, 1.0], atol=1e-13)


def test_exact_jacobi_integer_moments():
    w = Weight.from_spec(mk.WeightSpec.jacobi(0.0, 1.0, 1.0, 2.0))
    # (1-x) x^2 on [0,1]: moment k: 1/(k+3) - 1/(k+4)
    for k in range(4):
        assert float(w.exact_moment(k)) == pytest.approx(1.0 / (k + 3) - 1.0 / (k + 4),
                                                         abs=1e-15)


def test_support_segments(angelesco_ws, nikishin_ws):
    assert angelesco_ws.support_segments() == [(-1.0, 0.0), (0.0, 1.0)]
    assert nikishin_ws.support_segments() == [(1.0, 2.0)]
