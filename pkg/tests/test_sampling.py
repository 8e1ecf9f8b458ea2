"""The sampling series, its jump decomposition and the non-convergence witness."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from expsampling.analysis import check_kernel_conditions
from expsampling.exceptions import DomainError, NoLimitError
from expsampling.kernels import BSpline, Jackson, build_combined, combined_reference_kernel
from expsampling.sampling import (
    BATCH_COLUMNS,
    NON_ALIGNED,
    Aligned,
    SamplingConfig,
    aligned_point,
    analyze_jump,
    batch_rows,
    classify_alignment,
    divergence_witness,
    evaluate_series,
    node_window,
    predict_jump_limit,
    representation_decomposition,
    sample_nodes,
    series_terms,
)
from expsampling.signals import (
    JumpPoint,
    PiecewiseSignal,
    constant_signal,
    log_signal,
    three_jump_signal,
    unit_step,
)

B2 = BSpline(2)
REF = combined_reference_kernel()
F = three_jump_signal()
WS = (5, 10, 20, 50, 100, 200)


@pytest.fixture(scope="module")
def ref_report():
    return check_kernel_conditions(REF)


@pytest.fixture(scope="module")
def b2_report():
    return check_kernel_conditions(B2)


class TestNodes:
    def test_node_window_b2(self):
        assert node_window(B2, 1, 1) == (-1, 1)

    def test_node_window_reference(self):
        lo, hi = REF.support_log
        k_lo, k_hi = node_window(REF, 10, 1.5)
        y = 10 * math.log(1.5)
        assert k_lo == math.ceil(y - hi) and k_hi == math.floor(y - lo)

    def test_nodes_are_exponential(self):
        np.testing.assert_allclose(sample_nodes([0, 1, -2], 4.0), [1.0, math.exp(0.25), math.exp(-0.5)])

    def test_aligned_point_is_a_node(self):
        for m, w in [(3, 5), (-7, 2.5), (40, 26.0)]:
            assert aligned_point(m, w) == float(sample_nodes(m, w))

    @pytest.mark.parametrize("w, t", [(0, 1.0), (-1, 1.0), (1, 0.0), (1, -2.0)])
    def test_domain(self, w, t):
        with pytest.raises(DomainError):
            node_window(B2, w, t)

    def test_config_validation(self):
        assert SamplingConfig(2.0).align_tol == 1e-9
        with pytest.raises(DomainError):
            SamplingConfig(0.0)
        with pytest.raises(DomainError):
            SamplingConfig(1.0, trunc_epsilon=0.0)

    def test_only_support_terms_are_nonzero(self):
        k, weights = series_terms(REF, 7.0, np.array([0.9, 1.5, 6.0]))
        y = 7.0 * np.log([0.9, 1.5, 6.0])
        lo, hi = REF.support_log
        arg = y[:, None] - k
        assert np.all(weights[(arg < lo) | (arg > hi)] == 0.0)


class TestAlignment:
    def test_examples(self):
        assert classify_alignment(5, math.exp(3 / 5)) == Aligned(3)
        assert classify_alignment(5, 1.5) is NON_ALIGNED
        assert classify_alignment(5, 1.0) == Aligned(0)
        assert classify_alignment(3, math.exp(-2 / 3)) == Aligned(-2)

    def test_tolerance(self):
        t = math.exp((3 + 1e-6) / 5)
        assert classify_alignment(5, t) is NON_ALIGNED
        assert classify_alignment(5, t, align_tol=1e-5) == Aligned(3)

    def test_str(self):
        assert str(Aligned(4)) == "aligned(4)" and str(NON_ALIGNED) == "nonaligned"


class TestSeries:
    @pytest.mark.parametrize("table, t", [("1", 1.5), ("2", 3.5), ("3", 5.5)])
    def test_tables_against_high_precision(self, golden, table, t):
        for w in WS:
            assert evaluate_series(REF, F, w, t) == pytest.approx(golden["tables_mp"][table][str(w)], abs=1e-9)

    def test_against_mp_oracle_off_jump(self):
        for w, t in [(5, 2.0), (13.7, 0.8), (60, 6.3)]:
            y = w * math.log(t)
            exact = oracles.series_mp(oracles.reference_kernel_mp, oracles.three_jump_signal_exact,
                                      w, t, range(math.floor(y) - 4, math.floor(y) + 5))
            assert evaluate_series(REF, F, w, t) == pytest.approx(float(exact), abs=1e-12)

    def test_constants_reproduced(self):
        f = constant_signal(-2.5)
        for kernel in (B2, BSpline(4), REF):
            values = evaluate_series(kernel, f, 17.0, np.linspace(0.6, 7.0, 50))
            np.testing.assert_allclose(values, -2.5, atol=1e-13)

    def test_log_error_is_first_moment(self, golden):
        f = log_signal()
        for w in (50, 100, 200, 400):
            err = evaluate_series(REF, f, w, 2.0) - math.log(2.0)
            assert err == pytest.approx(golden["log_signal_error"][str(w)], rel=1e-9)

    def test_b2_interpolates_at_nodes(self):
        g = PiecewiseSignal((), ("sin(t) + t**2",))
        for m in range(-5, 15):
            t = aligned_point(m, 8.0)
            assert evaluate_series(B2, g, 8.0, t, Aligned(m)) == pytest.approx(g(t), abs=1e-14)

    def test_b2_is_linear_interpolation_in_log(self):
        g = PiecewiseSignal((), ("exp(t/3)",))
        w, t = 4.0, 2.2
        y = w * math.log(t)
        lo = math.floor(y)
        frac = y - lo
        expected = (1 - frac) * g(math.exp(lo / w)) + frac * g(math.exp((lo + 1) / w))
        assert evaluate_series(B2, g, w, t) == pytest.approx(expected, abs=1e-14)

    def test_scalar_and_array_agree(self):
        ts = np.array([0.7, 1.5, 3.9])
        arr = evaluate_series(REF, F, 20, ts)
        assert isinstance(evaluate_series(REF, F, 20, 0.7), float)
        assert arr.tolist() == [evaluate_series(REF, F, 20, t) for t in ts]

    @pytest.mark.filterwarnings("ignore:divide by zero")
    def test_failure_names_node(self):
        g = PiecewiseSignal((0.5,), ("1", "1/(t - 2)"), window=(0.6, 4.0))
        with pytest.raises(ValueError, match=r"node k=\d+"):
            evaluate_series(B2, g, 1 / math.log(2), 2.0 * math.exp(0.1))

    def test_continuity_points_converge(self):
        errs = [abs(evaluate_series(REF, F, w, 2.5) - 3.0) for w in (10, 100, 1000)]
        assert errs[-1] < 1e-9


class TestDecomposition:
    def test_nonaligned_example(self):
        d = representation_decomposition(REF, F, 10, 1.5)
        assert d.alignment is NON_ALIGNED
        assert d.psi_minus_val == 0.75 and d.chi_term == 0.0
        assert d.residual < 1e-14

    def test_at_continuity_point(self):
        d = representation_decomposition(REF, F, 10, 2.0)
        assert d.reconstructed == pytest.approx(d.series_h + F(2.0), abs=1e-15)
        assert d.residual < 1e-14

    def test_aligned_uses_chi_one(self):
        t = aligned_point(2, 1 / math.log(1.5))
        d = representation_decomposition(B2, unit_step(t), 1 / math.log(1.5), t)
        assert d.alignment == Aligned(2) and d.chi_term == 1.0
        assert d.direct == pytest.approx(1.0, abs=1e-14)
        assert d.residual < 1e-14

    @given(
        kernel=st.sampled_from([B2, BSpline(3), REF, Jackson(1.0, 3, trunc_epsilon=1e-14),
                                build_combined(BSpline(3), 1.5, BSpline(1), 0.5, 0.3)]),
        w=st.floats(1.0, 300.0),
        t=st.sampled_from([1.5, 3.5, 5.5, 2.0, 0.9]),
        aligned=st.booleans(),
        m=st.integers(1, 400),
    )
    def test_identity_random(self, kernel, w, t, aligned, m):
        if aligned:
            w = m / math.log(t) if t > 1 else m / -math.log(t)
            t = aligned_point(m if t > 1 else -m, w)
            f = PiecewiseSignal((t,), ("11/(2*t**2+1)", "2 + log(t)"), point_values=((t, -1.0),))
        else:
            f = F
        d = representation_decomposition(kernel, f, w, t)
        assert d.residual < 1e-10


class TestJumpLimits:
    def test_reference_kernel_predictions(self, ref_report):
        for t, limit in [(1.5, 2.75), (5.5, 1.25), (3.5, 2.25)]:
            left, right = F.one_sided_limits(t)
            jump = JumpPoint(t, left, right, F(t))
            assert predict_jump_limit(ref_report, jump, NON_ALIGNED) == pytest.approx(limit, abs=1e-12)

    def test_b2_aligned_gives_value(self, b2_report):
        jump = JumpPoint(2.0, 0.0, 1.0, 0.3)
        assert predict_jump_limit(b2_report, jump, Aligned(5)) == pytest.approx(0.3)

    def test_b2_nonaligned_has_no_limit(self, b2_report):
        with pytest.raises(NoLimitError, match="not constant"):
            predict_jump_limit(b2_report, JumpPoint(2.0, 0.0, 1.0, 1.0), NON_ALIGNED)

    def test_removable_jump(self, ref_report, b2_report):
        jump = JumpPoint(2.0, 4.0, 4.0, 9.0)
        assert predict_jump_limit(ref_report, jump, NON_ALIGNED) == 4.0
        assert predict_jump_limit(b2_report, jump, NON_ALIGNED) == 4.0
        assert predict_jump_limit(b2_report, jump, Aligned(1)) == pytest.approx(9.0)

    @pytest.mark.parametrize("t", [1.5, 5.5])
    def test_error_decreases(self, ref_report, t):
        result = analyze_jump(REF, F, t, WS, ref_report)
        errs = [abs(v - result.predicted_limit_nonaligned) for _, v in result.measured]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 6e-3

    def test_analyze_jump_b2(self, b2_report):
        result = analyze_jump(B2, F, 1.5, (5, 10), b2_report)
        assert math.isnan(result.predicted_limit_nonaligned)
        assert result.predicted_limit_aligned == pytest.approx(F(1.5))


class TestDivergence:
    def test_b2_gap(self):
        wit = divergence_witness(B2, unit_step(2.0), 2.0)
        assert wit.gap == pytest.approx(0.5, abs=1e-3)
        assert wit.predicted_gap == pytest.approx(0.5, abs=1e-12)
        assert wit.threshold == pytest.approx(0.5, abs=1e-12)
        assert wit.diverges

    def test_below_one(self):
        wit = divergence_witness(B2, unit_step(0.7), 0.7)
        assert wit.gap == pytest.approx(0.5, abs=1e-3)

    def test_reference_kernel_converges(self):
        wit = divergence_witness(REF, unit_step(2.0), 2.0)
        assert wit.gap < 1e-6 and not wit.diverges

    def test_sequences(self):
        wit = divergence_witness(B2, unit_step(2.0), 2.0, m_max=5)
        assert [m for m, _, _ in wit.aligned_sequence] == [1, 2, 3, 4, 5]
        assert wit.offset_sequence[0][1] == pytest.approx(1.5 / math.log(2.0))

    def test_rejects_t_one(self):
        with pytest.raises(DomainError, match="t = 1"):
            divergence_witness(B2, unit_step(1.0), 1.0)

    def test_rejects_short_sequence(self):
        with pytest.raises(DomainError):
            divergence_witness(B2, unit_step(2.0), 2.0, m_max=2)


def test_batch_rows(ref_report):
    rows = batch_rows(REF, F, [5, 10], [1.5, 2.0], ref_report)
    assert len(rows) == 4 and tuple(rows[0]) == BATCH_COLUMNS
    assert [(r["t"], r["w"]) for r in rows] == [(1.5, 5.0), (1.5, 10.0), (2.0, 5.0), (2.0, 10.0)]
    assert rows[0]["predicted"] == pytest.approx(2.75)
    assert rows[2]["predicted"] == 3.0
    assert rows[0]["signal-id"] == "three-jump"


def test_batch_rows_nan_without_limit(b2_report):
    rows = batch_rows(B2, F, [5], [1.5], b2_report)
    assert math.isnan(rows[0]["predicted"])
