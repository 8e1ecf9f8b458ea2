"""The exponential sampling series and its behaviour at jumps.

    (S_w f)(t) = sum_k chi(e^{-k} t^w) f(e^{k/w})

In log coordinates the kernel argument is y - k with y = w log t, so only the
k with y - k inside ``kernel.support_log`` contribute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import lattice_offsets, psi_minus_log
from .exceptions import DomainError, NoLimitError

# exp() of a node exponent beyond this over/underflows; such terms are dropped.
_MAX_LOG_NODE = 700.0


@dataclass(frozen=True)
class SamplingConfig:
    w: float
    trunc_epsilon: float = 1e-10
    align_tol: float = 1e-9

    def __post_init__(self):
        if not self.w > 0:
            raise DomainError(f"w must be positive, got {self.w!r}")
        if not self.trunc_epsilon > 0:
            raise DomainError(f"trunc_epsilon must be positive, got {self.trunc_epsilon!r}")


@dataclass(frozen=True)
class Aligned:
    """w log t equals the integer ``m``: t is the sample node e^{m/w}."""
    m: int

    def __str__(self):
        return f"aligned({self.m})"


@dataclass(frozen=True)
class NonAligned:
    def __str__(self):
        return "nonaligned"


NON_ALIGNED = NonAligned()


def sample_nodes(k, w):
    """Sample nodes e^{k/w}. Every series variant goes through this function."""
    return np.exp(np.asarray(k, dtype=float) / w)


def aligned_point(m, w):
    """The point t = e^{m/w}, bit-identical to the m-th sample node."""
    return float(sample_nodes(m, w))


def _check_wt(w, t):
    if not w > 0:
        raise DomainError(f"w must be positive, got {w!r}")
    if np.any(~(np.asarray(t, dtype=float) > 0)):
        raise DomainError(f"t must be positive, got {t!r}")


def classify_alignment(w, t, align_tol=1e-9):
    _check_wt(w, t)
    y = w * math.log(t)
    m = round(y)
    return Aligned(int(m)) if abs(y - m) <= align_tol else NON_ALIGNED


def node_window(kernel, w, t):
    """Inclusive integer range (k_lo, k_hi) of indices whose kernel argument is in the support."""
    _check_wt(w, t)
    y = w * math.log(t)
    lo, hi = kernel.support_log
    return math.ceil(y - hi), math.floor(y - lo)


def series_terms(kernel, w, t, alignment=None):
    """Index matrix ``k`` and kernel weights chi(e^{-k} t^w) for each t (rows).

    With ``alignment=Aligned(m)`` (scalar t only) the log argument is taken to
    be exactly m and the m-th node is identified with t.
    """
    _check_wt(w, t)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if isinstance(alignment, Aligned):
        if ts.size != 1:
            raise ValueError("an explicit alignment applies to a single t")
        y = np.array([float(alignment.m)])
    else:
        y = w * np.log(ts)
    k = np.floor(y)[:, None] + lattice_offsets(kernel)[None, :]
    weights = kernel.eval_log(y[:, None] - k)
    weights = np.where(np.abs(k / w) <= _MAX_LOG_NODE, weights, 0.0)
    return k, weights


def _node_values(f, k, w, weights, t=None, alignment=None, perturb=None):
    # nodes beyond _MAX_LOG_NODE carry zero weight; their overflow is harmless
    with np.errstate(over="ignore"):
        nodes = sample_nodes(k, w)
    if isinstance(alignment, Aligned):
        nodes = np.where(k == alignment.m, t, nodes)
    if perturb is not None:
        nodes = nodes + perturb
    vals = np.zeros_like(weights)
    mask = weights != 0.0
    try:
        vals[mask] = f(nodes[mask])
    except Exception as exc:
        for kk, x in zip(k[mask], nodes[mask]):
            try:
                f(np.array([x]))
            except Exception:
                raise ValueError(f"signal evaluation failed at node k={int(kk)} (x={x!r}): {exc}") from exc
        raise
    if not np.all(np.isfinite(vals[mask])):
        bad = k[mask][~np.isfinite(vals[mask])][0]
        raise ValueError(f"signal is not finite at node k={int(bad)}")
    return vals


def _row_fsum(products):
    return np.array([math.fsum(row) for row in products])


def evaluate_series(kernel, f, w, t, alignment=None):
    """(S_w f)(t) for scalar or array t; terms are summed with math.fsum."""
    k, weights = series_terms(kernel, w, t, alignment)
    vals = _node_values(f, k, w, weights, t=t, alignment=alignment)
    out = _row_fsum(weights * vals)
    return float(out[0]) if np.ndim(t) == 0 else out


# --------------------------------------------------------------------------
# Jump decomposition and jump limits
# --------------------------------------------------------------------------

@dataclass
class Decomposition:
    series_h: float
    psi_minus_val: float
    chi_term: float  # weight of the node equal to t (chi(1)); 0 when not aligned
    reconstructed: float
    direct: float
    residual: float
    alignment: object


def representation_decomposition(kernel, f, w, t, align_tol=1e-9):
    """Both sides of S_w f(t) = S_w h_t(t) + f(t-0) + psi^-(t^w) [f(t+0) - f(t-0)] (+ chi(1) [f(t) - f(t-0)]).

    The right-hand side is built from :func:`signals.build_h`, the one-sided
    limits and a direct psi^- sum; the chi(1) term is present only when t is a
    sample node.
    """
    from .signals import build_h

    alignment = classify_alignment(w, t, align_tol)
    left, right = f.one_sided_limits(t)
    h = build_h(f, t)
    if isinstance(alignment, Aligned):
        y = float(alignment.m)
        chi1 = float(kernel.eval_log(0.0))
        extra = chi1 * (f(t) - left)
    else:
        y = w * math.log(t)
        chi1 = 0.0
        extra = 0.0
    psi = float(psi_minus_log(kernel, y)[0])
    direct = evaluate_series(kernel, f, w, t, alignment if isinstance(alignment, Aligned) else None)
    series_h = evaluate_series(kernel, h, w, t, alignment if isinstance(alignment, Aligned) else None)
    reconstructed = math.fsum([series_h, left, psi * (right - left), extra])
    return Decomposition(series_h, psi, chi1, reconstructed, direct, abs(direct - reconstructed), alignment)


def predict_jump_limit(report, jump, alignment):
    """Limit of S_w f(t) as w -> infinity along the given alignment class.

    ``report`` is a :class:`analysis.KernelReport`. Aligned points use
    alpha = psi^-(1) and pick up chi(1) f(t); other points need psi^- constant
    on (1, e), otherwise :class:`NoLimitError` is raised.
    """
    left, right, value = jump.left_limit, jump.right_limit, jump.value_at
    chi1 = report.chi_at_one
    if isinstance(alignment, Aligned):
        if jump.removable:
            return left + chi1 * (value - left)
        a1 = report.psi_minus_at_one
        return a1 * right + (1.0 - a1 - chi1) * left + chi1 * value
    if jump.removable:
        return left
    if not report.alpha_is_constant:
        raise NoLimitError(
            f"psi^- is not constant on (1, e) (spread {report.psi_spread:.3g}); "
            f"S_w f({jump.t:g}) has no limit along non-aligned w"
        )
    alpha = report.alpha_estimate
    return alpha * right + (1.0 - alpha) * left


@dataclass
class JumpAnalysis:
    t: float
    alpha: object
    chi_at_one: float
    predicted_limit_nonaligned: float  # nan when no limit exists
    predicted_limit_aligned: float
    measured: list = field(default_factory=list)  # (w, value)
    cases: list = field(default_factory=list)  # alignment per w


def analyze_jump(kernel, f, t, ws, report, align_tol=1e-9):
    from .signals import JumpPoint

    left, right = f.one_sided_limits(t)
    jump = JumpPoint(float(t), left, right, f(t))
    try:
        nonaligned = predict_jump_limit(report, jump, NON_ALIGNED)
    except NoLimitError:
        nonaligned = math.nan
    aligned = predict_jump_limit(report, jump, Aligned(0))
    measured, cases = [], []
    for w in ws:
        case = classify_alignment(w, t, align_tol)
        measured.append((float(w), evaluate_series(kernel, f, w, t, case if isinstance(case, Aligned) else None)))
        cases.append(case)
    return JumpAnalysis(float(t), report.alpha_estimate, report.chi_at_one, nonaligned, aligned, measured, cases)


# --------------------------------------------------------------------------
# Non-convergence witness
# --------------------------------------------------------------------------

@dataclass
class DivergenceWitness:
    aligned_sequence: list  # (m, w, value)
    offset_sequence: list
    aligned_sequence_limit: float
    offset_sequence_limit: float
    gap: float
    predicted_aligned: float
    predicted_offset: float
    threshold: float  # |psi^-(1) - psi^-(e^{1/2})| * |jump|
    aligned_cauchy: bool
    offset_cauchy: bool
    cauchy_tol: float

    @property
    def predicted_gap(self):
        return abs(self.predicted_aligned - self.predicted_offset)

    @property
    def diverges(self):
        return self.aligned_cauchy and self.offset_cauchy and self.gap > self.cauchy_tol


def _cauchy(values, tol):
    tail = values[-3:]
    return max(tail) - min(tail) <= tol


def divergence_witness(kernel, f, t, m_max=40, cauchy_tol=1e-4):
    """S_w f(t) along w_m = m / |log t| (t a node) and w_m = (m + 1/2) / |log t|.

    Each empirical limit is the value at m = m_max; the last three values must
    agree to ``cauchy_tol``.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    L = math.log(t)
    if L == 0.0:
        raise DomainError("t = 1 is a node for every w; the witness needs log t != 0")
    if m_max < 3:
        raise DomainError("m_max must be at least 3")
    sign = 1 if L > 0 else -1
    left, right = f.one_sided_limits(t)
    value = f(t)

    aligned, offset = [], []
    for m in range(1, m_max + 1):
        w = m / abs(L)
        aligned.append((m, w, evaluate_series(kernel, f, w, t, Aligned(sign * m))))
        w = (m + 0.5) / abs(L)
        offset.append((m, w, evaluate_series(kernel, f, w, t)))

    psi_one = float(psi_minus_log(kernel, 0.0)[0])
    psi_half = float(psi_minus_log(kernel, 0.5)[0])
    chi1 = float(kernel.eval_log(0.0))
    pred_aligned = psi_one * right + (1.0 - psi_one - chi1) * left + chi1 * value
    pred_offset = left + psi_half * (right - left)

    a_vals = [v for _, _, v in aligned]
    o_vals = [v for _, _, v in offset]
    return DivergenceWitness(
        aligned_sequence=aligned,
        offset_sequence=offset,
        aligned_sequence_limit=a_vals[-1],
        offset_sequence_limit=o_vals[-1],
        gap=abs(a_vals[-1] - o_vals[-1]),
        predicted_aligned=pred_aligned,
        predicted_offset=pred_offset,
        threshold=abs(psi_one - psi_half) * abs(right - left),
        aligned_cauchy=_cauchy(a_vals, cauchy_tol),
        offset_cauchy=_cauchy(o_vals, cauchy_tol),
        cauchy_tol=cauchy_tol,
    )


# --------------------------------------------------------------------------
# Batch evaluation
# --------------------------------------------------------------------------

BATCH_COLUMNS = ("kernel-id", "signal-id", "w", "t", "alignment", "value", "predicted", "abs-error")


def batch_rows(kernel, f, ws, ts, report, kernel_id=None, signal_id=None, align_tol=1e-9):
    """Rows for the batch CSV, ordered by (t index, w index).

    ``predicted`` is the jump limit at breakpoints of f and f(t) elsewhere; it
    is nan where no limit exists.
    """
    from .signals import JumpPoint

    kernel_id = kernel_id or kernel.declaration
    signal_id = signal_id or f.name
    rows = []
    for t in ts:
        left, right = f.one_sided_limits(t)
        jump = JumpPoint(float(t), left, right, f(t))
        for w in ws:
            case = classify_alignment(w, t, align_tol)
            value = evaluate_series(kernel, f, w, t, case if isinstance(case, Aligned) else None)
            if float(t) in f.breakpoints:
                try:
                    predicted = predict_jump_limit(report, jump, case)
                except NoLimitError:
                    predicted = math.nan
            else:
                predicted = f(t)
            rows.append({
                "kernel-id": kernel_id,
                "signal-id": signal_id,
                "w": float(w),
                "t": float(t),
                "alignment": str(case),
                "value": value,
                "predicted": predicted,
                "abs-error": abs(value - predicted),
            })
    return rows
