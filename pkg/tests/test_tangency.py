"""Order estimation, the arc criterion, and Lojasiewicz exponents."""

import math
from fractions import Fraction

import numpy as np
import pytest

from lnegerm import (
    DisconnectedError,
    InputError,
    Verdict,
    builtin,
    estimate_order,
    germ_set,
    inner_tangency_order,
    lojasiewicz_germ,
    outer_tangency_order,
    pair_verdict,
    puiseux_branch,
)

SCALES = tuple(2.0 ** -k for k in range(3, 10))


class TestEstimateOrder:
    def test_recovers_pure_power_law(self):
        samples = [(t, 3.0 * t**1.5) for t in SCALES]
        fit = estimate_order(samples)
        assert fit.slope == pytest.approx(1.5, abs=1e-9)
        assert fit.leading_constant == pytest.approx(3.0, rel=1e-9)
        assert fit.confident

    def test_needs_enough_scales(self):
        with pytest.raises(InputError):
            estimate_order([(0.1, 1.0), (0.05, 0.5)])

    def test_needs_geometric_scales(self):
        with pytest.raises(InputError):
            estimate_order([(t, t) for t in (0.5, 0.4, 0.3, 0.2, 0.1)])

    def test_rejects_nonpositive_values(self):
        with pytest.raises(InputError):
            estimate_order([(t, 0.0) for t in SCALES])

    def test_low_confidence_on_noise(self):
        rng = np.random.default_rng(3)
        samples = [(t, t * math.exp(rng.normal(0, 0.3))) for t in SCALES]
        assert not estimate_order(samples).confident


class TestOuterOrder:
    def test_cusp_pair(self):
        germ = builtin("cusp").germ()
        fit, exact = outer_tangency_order(*germ.branches, SCALES)
        assert exact == Fraction(3, 2)
        assert fit.slope == pytest.approx(1.5, abs=0.02)

    def test_numeric_matches_symbolic_on_mixed_exponents(self):
        b1 = puiseux_branch([(1, (1, 0)), ((5, 2), (0, 2))], 1.0, "b1")
        b2 = puiseux_branch([(1, (1, 0)), ((5, 2), (0, -1))], 1.0, "b2")
        fit, exact = outer_tangency_order(b1, b2, SCALES)
        assert exact == Fraction(5, 2)
        assert fit.slope == pytest.approx(2.5, abs=0.05)

    def test_indistinguishable_branches_rejected(self):
        b1 = puiseux_branch([(1, (1, 0))], 1.0, "b1")
        b2 = puiseux_branch([(1, (1, 0))], 1.0, "b2")
        with pytest.raises(InputError):
            outer_tangency_order(b1, b2, SCALES)


class TestInnerOrder:
    def test_transverse_lines_order_one(self):
        germ = builtin("abs_graph").germ()
        fit = inner_tangency_order(germ, *germ.branches, SCALES, density=32)
        assert fit.slope == pytest.approx(1.0, abs=0.02)

    def test_disconnected_reported(self):
        b1 = puiseux_branch([(1, (1, 0))], 1.0, "b1")
        b2 = puiseux_branch([(1, (0, 1))], 1.0, "b2")
        germ = germ_set(branches=(b1, b2), label="cross")
        with pytest.raises(DisconnectedError):
            # a tiny radius factor splits the graph at the origin junction
            inner_tangency_order(germ, b1, b2, SCALES, density=32, radius_factor=0.2)


class TestPairVerdict:
    def test_cusp_not_lne(self, config):
        germ = builtin("cusp").germ()
        rep = pair_verdict(germ, *germ.branches, SCALES, density=32)
        assert rep.verdict is Verdict.NOT_LNE
        assert rep.lojasiewicz_pair == pytest.approx(1.5, abs=0.1)

    def test_abs_graph_lne(self):
        germ = builtin("abs_graph").germ()
        rep = pair_verdict(germ, *germ.branches, SCALES, density=32)
        assert rep.verdict is Verdict.LNE
        assert rep.lojasiewicz_pair == pytest.approx(1.0, abs=0.05)

    def test_order_tolerance_gate(self):
        # the LNE/NOT_LNE boundary is exactly |tord - tord_inn| <= tol
        germ = builtin("cusp").germ()
        loose = pair_verdict(germ, *germ.branches, SCALES, density=32,
                             order_tolerance=1.0)
        assert loose.verdict is Verdict.LNE
        tight = pair_verdict(germ, *germ.branches, SCALES, density=32,
                             order_tolerance=0.1)
        assert tight.verdict is Verdict.NOT_LNE


class TestLojasiewiczGerm:
    def test_three_tangent_witness(self):
        germ = builtin("three_tangent").germ()
        # start one octave below SCALES: at t_max = 1/8 the higher-order
        # corrections push the outer-fit residual past the confidence gate
        scales = tuple(2.0 ** -k for k in range(4, 11))
        res = lojasiewicz_germ(germ, scales, density=32)
        assert res.value == pytest.approx(2.0, abs=0.1)
        assert not res.lower_bound_only
        assert len(res.reports) == 3
        # the extreme pair is any of the three; all have exponent ~2
        for rep in res.reports:
            assert rep.verdict is Verdict.NOT_LNE

    def test_single_branch_is_normally_embedded(self):
        germ = germ_set(
            branches=(puiseux_branch([(1, (1, 0))], 1.0, "b"),), label="line"
        )
        res = lojasiewicz_germ(germ, SCALES, density=32)
        assert res.value == 1.0
        assert res.witness is None
