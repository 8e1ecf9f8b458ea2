"""Piecewise signals, one-sided limits, the auxiliary signal h and moduli of continuity."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from expsampling.exceptions import DomainError
from expsampling.signals import (
    PiecewiseSignal,
    build_h,
    constant_signal,
    derivative_sup,
    eval_signal,
    linear_signal,
    log_modulus,
    log_signal,
    one_sided_limits,
    parse_expression,
    parse_number,
    random_corpus,
    sup_norm,
    three_jump_signal,
    unit_step,
)

F = three_jump_signal()


class TestExpressions:
    def test_rational_literals_are_exact(self):
        assert parse_number("11/3") == 11 / 3
        assert parse_number("0.1 + 0.2") == pytest.approx(0.3, abs=0)

    def test_functions_and_constants(self):
        assert parse_number("exp(1) - e") == 0.0
        assert parse_number("log(e**2)") == 2.0
        assert parse_number("abs(-2) * sqrt(4)") == 4.0

    @pytest.mark.parametrize("bad", ["__import__('os')", "t.real", "x + 1", "lambda: 1", "t[0]",
                                     "max(t, 1)", "log(t, 2)", "True", "'a'", "1 +"])
    def test_rejects_everything_else(self, bad):
        with pytest.raises(ValueError):
            parse_expression(bad)

    def test_number_rejects_free_t(self):
        with pytest.raises(ValueError, match="constant"):
            parse_number("t + 1")


class TestEvaluation:
    def test_three_jump_values(self):
        assert eval_signal(F, 1.0) == pytest.approx(11 / 3, abs=1e-15)
        assert eval_signal(F, 1.5) == 3.0
        assert eval_signal(F, 6.0) == pytest.approx(12 / 13, abs=1e-15)

    def test_closure_takes_right_piece(self):
        for t in F.breakpoints:
            assert F(t) == one_sided_limits(F, t)[1]

    @given(t=st.floats(0.01, 50))
    def test_matches_oracle(self, t):
        assert F(t) == pytest.approx(oracles.three_jump_signal_exact(t), rel=1e-15)

    def test_vectorized(self):
        ts = np.array([1.0, 1.5, 6.0])
        np.testing.assert_allclose(F(ts), [11 / 3, 3.0, 12 / 13])

    def test_domain(self):
        with pytest.raises(DomainError):
            F(0.0)
        with pytest.raises(DomainError):
            F(np.array([1.0, -1.0]))

    def test_point_values_override(self):
        g = PiecewiseSignal((2.0,), ("0", "1"), point_values=((2.0, 0.5),))
        assert g(2.0) == 0.5 and g(2.0 + 1e-12) == 1.0

    @pytest.mark.parametrize("kwargs,match", [
        (dict(breakpoints=(2.0, 1.0), pieces=("0", "1", "2")), "increasing"),
        (dict(breakpoints=(1.0,), pieces=("0",)), "pieces"),
        (dict(breakpoints=(1.0,), pieces=("1/(t-1)", "0")), "not finite"),
        (dict(breakpoints=(), pieces=("t",), window=(2.0, 1.0)), "window"),
    ])
    def test_invalid_signals(self, kwargs, match):
        with pytest.raises(ValueError, match=match):
            PiecewiseSignal(**kwargs)


class TestLimits:
    def test_three_jump_limits(self):
        assert one_sided_limits(F, 1.5) == pytest.approx((2.0, 3.0), abs=1e-15)
        assert one_sided_limits(F, 5.5) == pytest.approx((2.0, 1.0), abs=1e-15)
        assert one_sided_limits(F, 2.0) == (3.0, 3.0)

    def test_jump_metadata(self):
        jumps = F.jumps()
        assert [j.t for j in jumps] == [1.5, 3.5, 5.5]
        assert not any(j.removable for j in jumps)
        assert jumps[0].size == pytest.approx(1.0)
        assert not F.continuous
        assert log_signal().continuous

    def test_removable_jump(self):
        g = PiecewiseSignal((2.0,), ("t", "2"), point_values=((2.0, 5.0),))
        (j,) = g.jumps()
        assert j.removable and j.value_at == 5.0
        assert not g.continuous


class TestAuxiliarySignal:
    def test_values(self):
        h = build_h(F, 1.5)
        assert h(1.0) == pytest.approx(11 / 3 - 2, abs=1e-15)
        assert h(2.0) == 0.0
        assert h(1.5) == 0.0

    @pytest.mark.parametrize("t", [1.5, 3.5, 5.5, 2.0, 0.9])
    def test_continuous_at_t_with_value_zero(self, t):
        h = build_h(F, t)
        left, right = h.one_sided_limits(t)
        assert left == pytest.approx(0.0, abs=1e-15)
        assert right == pytest.approx(0.0, abs=1e-15)
        assert h(t) == 0.0
        assert h(t * (1 - 1e-9)) == pytest.approx(0.0, abs=1e-7)

    def test_keeps_other_jumps(self):
        h = build_h(F, 3.5)
        assert h.one_sided_limits(1.5) == pytest.approx((2.0 - 3.0, 0.0), abs=1e-15)


class TestNorms:
    def test_constant(self):
        c = constant_signal(-2.5)
        assert log_modulus(c, 0.3) == 0.0
        assert sup_norm(c) == 2.5
        assert derivative_sup(c) == 0.0

    @pytest.mark.parametrize("delta", [0.5, 0.1, 0.0123, 1e-3])
    def test_log_is_log_lipschitz(self, delta):
        assert log_modulus(log_signal(), delta, exact_delta=True) == pytest.approx(delta, rel=1e-12)
        h = 2.0 / 4000
        assert delta - h <= log_modulus(log_signal(), delta) <= delta * (1 + 1e-12)

    def test_three_jump_sup_norm(self):
        assert sup_norm(F, (0.5, 8.0)) == pytest.approx(22 / 3, rel=1e-12)

    def test_derivative_sup(self):
        assert derivative_sup(log_signal(), (1.0, math.e)) == pytest.approx(1.0, rel=1e-12)
        assert derivative_sup(linear_signal()) == 1.0

    def test_derivative_excludes_jumps(self):
        assert derivative_sup(unit_step(2.0)) == 0.0

    @pytest.mark.parametrize("f", [F, log_signal()] + random_corpus(np.random.default_rng(4), 6),
                             ids=lambda f: f.name)
    def test_doubling_property(self, f):
        for delta in (0.05, 0.2, 0.7):
            assert log_modulus(f, 2 * delta) <= 3 * log_modulus(f, delta) + 1e-12

    @pytest.mark.parametrize("f", random_corpus(np.random.default_rng(5), 8), ids=lambda f: f.name)
    def test_vanishes_with_delta(self, f):
        vals = [log_modulus(f, 2.0 ** -j) for j in range(1, 9)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.1 * vals[0] + 1e-12

    def test_monotone_in_delta(self):
        deltas = np.linspace(0.01, 2.0, 40)
        vals = [log_modulus(F, d) for d in deltas]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_pairwise_property(self):
        rng = np.random.default_rng(6)
        f = random_corpus(rng, 3)[1]
        lo, hi = f.window
        delta = 0.1
        omega = log_modulus(f, delta, grid=20001)
        p = np.exp(rng.uniform(math.log(lo), math.log(hi), 1000))
        q = np.exp(rng.uniform(math.log(lo), math.log(hi), 1000))
        lhs = np.abs(f(p) - f(q))
        rhs = omega * (1 + np.abs(np.log(p) - np.log(q)) / delta)
        assert np.all(lhs <= rhs * (1 + 1e-6) + 1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_modulus(F, 0.0)


class TestCorpus:
    def test_deterministic(self):
        a = random_corpus(np.random.default_rng(1), 10)
        b = random_corpus(np.random.default_rng(1), 10)
        assert a == b

    def test_continuous_and_bounded(self):
        for f in random_corpus(np.random.default_rng(2), 24):
            assert f.continuous
            for t in f.breakpoints:
                left, right = f.one_sided_limits(t)
                assert left == pytest.approx(right, abs=1e-12)
            assert math.isfinite(sup_norm(f))
