import math
import random
import warnings

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from cascade_budget.analytic import (
    CascadeProbabilities,
    Formula,
    Mode,
    pcc,
    pcc_rational_approximation,
    rational_census,
    rational_gap,
    solve_p2_for_a,
    ycas_irrational,
    ycas_rational,
)
from cascade_budget.core import SignalQualities, TruthState, cascade_constant, k_index
from cascade_budget.errors import (
    CascadeError,
    ConstantMismatch,
    NearIntegerAmbiguity,
    NoSolution,
    NotRational,
    ToleranceUnreachable,
)

from oracles import a_of, chain_pcc, series, solve_p2

quality = st.floats(min_value=0.501, max_value=0.999, allow_nan=False)


def _sq(p1, p2):
    return SignalQualities(float(p1), float(p2))


class TestSeriesAgainstOracle:
    @pytest.mark.parametrize(
        "p1,p2", [("0.7", "0.8"), ("0.6", "0.75"), ("0.6", "0.7"), ("0.6", "0.85"), ("0.55", "0.95"), ("0.51", "0.99")]
    )
    def test_irrational_series(self, p1, p2):
        g, b, p = series(p1, p2)
        res = pcc(_sq(p1, p2), Mode.IRRATIONAL)
        assert res.ycas_g == pytest.approx(float(g), abs=1e-12)
        assert res.ycas_b == pytest.approx(float(b), abs=1e-12)
        assert res.pcc == pytest.approx(float(p), abs=1e-12)

    def test_reference_values(self):
        res = pcc(_sq(0.7, 0.8))
        assert res.mode is Formula.IRRATIONAL_SERIES
        assert res.pcc == pytest.approx(0.824047599, abs=1e-9)
        assert res.ycas_g == pytest.approx(0.886815, abs=1e-6)
        assert res.ycas_b == pytest.approx(0.238720, abs=1e-6)

    @pytest.mark.parametrize("r,q", [(1, 1), (3, 2), (9, 7), (5, 2), (7, 3), (4, 3)])
    def test_closed_form_against_absorbing_chain(self, r, q):
        p1 = mp.mpf("0.6")
        p2 = p1 if r == q else solve_p2(p1, mp.mpf(r) / q)
        g, b, p = chain_pcc(p1, p2, r, q)
        sq = _sq(0.6, float(p2))
        assert ycas_rational(sq, r, q, TruthState.G) == pytest.approx(float(g), abs=1e-12)
        assert ycas_rational(sq, r, q, TruthState.B) == pytest.approx(float(b), abs=1e-12)

    def test_symmetric_chain_value(self):
        g, b, p = chain_pcc("0.7", "0.7", 1, 1)
        assert float(p) == pytest.approx(49 / 58, abs=1e-15)


class TestClosedForm:
    @pytest.mark.parametrize("p", [0.51, 0.55, 0.6, 0.7, 0.8, 0.9, 0.99])
    def test_symmetric_identity(self, p):
        sq = _sq(p, p)
        assert ycas_rational(sq, 1, 1, TruthState.G) == pytest.approx(
            p * p / (1 - 2 * p * (1 - p)), abs=1e-15)
        res = pcc(sq, Mode.RATIONAL)
        assert res.pcc == pytest.approx(0.5 * (1 + (2 * p - 1) / (1 - 2 * p * (1 - p))), abs=1e-15)

    def test_auto_uses_closed_form_on_symmetric_line(self):
        res = pcc(_sq(0.7, 0.7))
        assert res.mode is Formula.RATIONAL_CLOSED_FORM and (res.r, res.q) == (1, 1)
        assert res.pcc == pytest.approx(49 / 58, abs=1e-12)

    def test_auto_ignores_rationality_off_the_line(self):
        p2 = solve_p2_for_a(0.6, 1.5)
        assert pcc(_sq(0.6, p2)).mode is Formula.IRRATIONAL_SERIES
        assert pcc(_sq(0.6, p2), Mode.RATIONAL).mode is Formula.RATIONAL_CLOSED_FORM

    def test_mismatch_and_not_rational(self):
        with pytest.raises(ConstantMismatch):
            ycas_rational(_sq(0.7, 0.8), 3, 2, TruthState.G)
        with pytest.raises(ConstantMismatch):
            ycas_rational(_sq(0.7, 0.7), 2, 2, TruthState.G)
        with pytest.raises(NotRational):
            pcc(_sq(0.7, 0.8), Mode.RATIONAL)

    def test_series_requires_canonical(self):
        with pytest.raises(CascadeError):
            ycas_irrational(_sq(0.8, 0.7), TruthState.G)


class TestSeriesProperties:
    def test_tail_bound_soundness(self):
        rng = random.Random(3)
        for _ in range(100):
            p1, p2 = sorted(rng.uniform(0.501, 0.999) for _ in range(2))
            sq = _sq(p1, p2)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NearIntegerAmbiguity)
                for truth in TruthState:
                    coarse = ycas_irrational(sq, truth, 1e-6)
                    fine = ycas_irrational(sq, truth, 1e-12)
                    assert coarse.tail_bound < 1e-6
                    assert abs(fine.value - coarse.value) < coarse.tail_bound

    @settings(max_examples=100, deadline=None)
    @given(quality, quality)
    def test_swap_symmetry(self, p1, p2):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NearIntegerAmbiguity)
            x = pcc(_sq(p1, p2), Mode.IRRATIONAL)
            y = pcc(_sq(p2, p1), Mode.IRRATIONAL)
        assert abs(x.pcc - y.pcc) <= 2 * max(x.tail_bound, y.tail_bound) + 1e-15
        assert y.swapped != x.swapped or p1 == p2

    def test_swap_relabels_conditionals(self):
        x = pcc(_sq(0.7, 0.8))
        y = pcc(_sq(0.8, 0.7))
        assert y.swapped and y.ycas_g == x.ncas_b and y.ncas_b == x.ycas_g
        assert y.a == pytest.approx(1 / x.a, rel=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(quality, quality)
    def test_first_term_lower_bound(self, p1, p2):
        p1, p2 = min(p1, p2), max(p1, p2)
        sq = _sq(p1, p2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NearIntegerAmbiguity)
            cc = cascade_constant(sq)
            g = ycas_irrational(sq, TruthState.G, cc=cc).value
            k0 = k_index(0, cc)
        assert g >= p1**k0 * (1 - 1e-15)
        assert 0.0 < g < 1.0

    @pytest.mark.parametrize("p", [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9])
    def test_symmetric_point_cancellation(self, p):
        # exact floor gives k_i = i + 2, the right limit k_i = i + 1
        floor_res = pcc(_sq(p, p), Mode.IRRATIONAL)
        u_g, v_g, u_b, v_b = 1 - p, p, p, 1 - p
        right_g = v_g / (1 - u_g * v_g)
        right_b = v_b / (1 - u_b * v_b)
        assert abs(floor_res.ycas_g - right_g) > 1e-3
        assert floor_res.pcc == pytest.approx(0.5 * (right_g + 1 - right_b), abs=1e-12)

    def test_tolerance_unreachable(self, monkeypatch):
        import cascade_budget.analytic as analytic

        monkeypatch.setattr(analytic, "MAX_TERMS", 3)
        with pytest.raises(ToleranceUnreachable):
            ycas_irrational(_sq(0.7, 0.8), TruthState.G, 1e-12)

    def test_extreme_quality_converges(self):
        res = pcc(_sq(0.501, 1 - 1e-6), Mode.IRRATIONAL)
        assert res.tail_bound <= 1e-12 and 0.5 < res.pcc < 1.0


class TestSolveAndGap:
    @pytest.mark.parametrize("p1,a", [(0.6, 1.5), (0.7, 9 / 7), (0.55, 3.0), (0.7, 2.0)])
    def test_solve_round_trip(self, p1, a):
        p2 = solve_p2_for_a(p1, a)
        assert float(a_of(p1, p2)) == pytest.approx(a, abs=1e-11)
        assert p2 == pytest.approx(float(solve_p2(p1, a)), abs=1e-11)

    def test_solve_reference(self):
        assert solve_p2_for_a(0.6, 1.5) == pytest.approx(0.7794043, abs=1e-7)
        a = cascade_constant(SignalQualities(0.7, 0.8)).a
        assert solve_p2_for_a(0.7, a) == pytest.approx(0.8, abs=1e-10)

    def test_no_solution(self):
        with pytest.raises(NoSolution):
            solve_p2_for_a(0.7, 0.5)
        with pytest.raises(NoSolution):
            solve_p2_for_a(0.7, 1e6)

    def test_gap_at_symmetric_point(self):
        gap = rational_gap(0.7, 1, 1)
        assert gap.p2 == 0.7
        assert gap.gap_pcc == pytest.approx(49 / 58 - 0.7531645569620, abs=1e-9)

    def test_gap_shrinks_with_denominator(self):
        assert rational_gap(0.7, 9, 7).gap_pcc < rational_gap(0.7, 1, 1).gap_pcc
        assert rational_gap(0.7, 9, 7).gap_g < 1e-5

    def test_census(self):
        report = rational_census(0.7, 0.05, 32)
        assert report.theoretical_bound == pytest.approx((math.log2(20) + 1) ** 2)
        assert report.within_bound
        assert report.exceed_count == sum(max(e.gap_g, e.gap_b) > 0.05 for e in report.entries)
        for e in report.entries:
            assert e.q <= e.r <= 32 and math.gcd(e.r, e.q) == 1
        assert all(max(e.gap_g, e.gap_b) < 1e-3 for e in report.entries if e.r >= 9)


class TestRationalApproximation:
    def test_exact_fraction_matches_rational_mode(self):
        p2 = solve_p2_for_a(0.6, 1.5)
        approx = pcc_rational_approximation(_sq(0.6, p2))
        exact = pcc(_sq(0.6, p2), Mode.RATIONAL)
        assert (approx.r, approx.q) == (3, 2)
        assert approx.pcc == pytest.approx(exact.pcc, abs=1e-12)

    def test_swapped(self):
        x = pcc_rational_approximation(_sq(0.7, 0.8))
        y = pcc_rational_approximation(_sq(0.8, 0.7))
        assert y.pcc == x.pcc and y.swapped

    def test_as_dict_is_flat(self):
        d = pcc(_sq(0.7, 0.8)).as_dict()
        assert all(isinstance(v, (int, float, str, bool, type(None))) for v in d.values())
        assert isinstance(pcc(_sq(0.7, 0.8)), CascadeProbabilities)
