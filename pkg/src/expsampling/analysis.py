"""Admissibility checks and jump-controlling quantities of a kernel.

All lattice sums run over k in Z with e^{-k} u inside the kernel support,
i.e. over the finitely many k with log(u) - k in ``kernel.support_log``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, NumericalError
from .kernels import Jackson, _as_positive, _scalar_or_array

_CHUNK = 2_000_000
# default sup grids shrink for very wide kernels so that grid x lattice stays near this
_LATTICE_BUDGET = 20_000_000
_GL20 = np.polynomial.legendre.leggauss(20)
_GL10 = np.polynomial.legendre.leggauss(10)


def lattice_offsets(kernel):
    """Offsets j such that k = floor(y) + j covers every k with y - k in the support."""
    lo, hi = kernel.support_log
    return np.arange(math.floor(-hi), math.ceil(1.0 - lo) + 1)


def default_grid_size(kernel, grid_size=None):
    """``grid_size`` if given; otherwise 10_000 points, fewer (not below 1000) for wide kernels."""
    if grid_size is not None:
        return int(grid_size)
    return int(min(10_000, max(1000, _LATTICE_BUDGET // lattice_offsets(kernel).size)))


def _lattice_reduce(kernel, y, reducer, n_out=None):
    """Apply ``reducer(y[:, None], k, chi(y - k))`` row-wise over the lattice window of each y.

    With ``n_out`` set, the reducer returns a tuple of that many row vectors and
    a tuple of arrays comes back.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    offsets = lattice_offsets(kernel)
    outs = [np.empty_like(y) for _ in range(n_out or 1)]
    step = max(1, _CHUNK // offsets.size)
    for start in range(0, y.size, step):
        yy = y[start:start + step, None]
        k = np.floor(yy) + offsets[None, :]
        weights = kernel.eval_log(yy - k)
        res = reducer(yy, k, weights)
        for out, r in zip(outs, res if n_out else (res,)):
            out[start:start + step] = r
    return tuple(outs) if n_out else outs[0]


def _log_arg(u):
    arr = _as_positive(u, "u")
    return np.log(arr)


def partition_sum_log(kernel, y):
    return _lattice_reduce(kernel, y, lambda yy, k, wts: wts.sum(axis=1))


def partition_residual(kernel, u):
    """sum_k chi(e^{-k} u) - 1."""
    y = _log_arg(u)
    return _scalar_or_array(partition_sum_log(kernel, y) - 1.0, u)


def psi_minus_log(kernel, y):
    return _lattice_reduce(kernel, y, lambda yy, k, wts: np.where(k > yy, wts, 0.0).sum(axis=1))


def psi_plus_log(kernel, y):
    return _lattice_reduce(kernel, y, lambda yy, k, wts: np.where(k < yy, wts, 0.0).sum(axis=1))


def psi_minus(kernel, u):
    """Sum of chi(u e^{-k}) over k > log u (strict)."""
    return _scalar_or_array(psi_minus_log(kernel, _log_arg(u)), u)


def psi_plus(kernel, u):
    """Sum of chi(u e^{-k}) over k < log u (strict)."""
    return _scalar_or_array(psi_plus_log(kernel, _log_arg(u)), u)


def _warn_divergent_moment(kernel, nu):
    if isinstance(kernel, Jackson) and nu >= 2 * kernel.beta - 1:
        warnings.warn(
            f"M_{nu:g} of a Jackson kernel with beta={kernel.beta} may be infinite "
            f"(needs nu < {2 * kernel.beta - 1}); returning the truncated sum",
            RuntimeWarning,
            stacklevel=3,
        )


def absolute_moment_log(kernel, nu, y):
    return _lattice_reduce(kernel, y, lambda yy, k, wts: (np.abs(wts) * np.abs(k - yy) ** nu).sum(axis=1))


def absolute_moment(kernel, nu, u):
    """M_nu(chi, u) = sum_k |chi(e^{-k} u)| |k - log u|^nu."""
    if not nu >= 0:
        raise DomainError(f"nu must be >= 0, got {nu!r}")
    _warn_divergent_moment(kernel, nu)
    return _scalar_or_array(absolute_moment_log(kernel, nu, _log_arg(u)), u)


def sup_absolute_moment(kernel, nu, grid_size=None):
    """M_nu(chi): sup of M_nu(chi, u) over a (grid_size + 1)-point grid of log u in [0, 1].

    M_nu(chi, e u) = M_nu(chi, u), so [1, e] is enough. The default grid comes
    from :func:`default_grid_size`.
    """
    if not nu >= 0:
        raise DomainError(f"nu must be >= 0, got {nu!r}")
    _warn_divergent_moment(kernel, nu)
    y = np.linspace(0.0, 1.0, default_grid_size(kernel, grid_size) + 1)
    return float(np.max(absolute_moment_log(kernel, nu, y)))


def algebraic_moment(kernel, nu, u):
    """m_nu(chi, u) = sum_k chi(e^{-k} u) (k - log u)^nu for integer nu >= 0."""
    if not isinstance(nu, (int, np.integer)) or nu < 0:
        raise DomainError(f"nu must be a nonnegative integer, got {nu!r}")
    y = _log_arg(u)
    vals = _lattice_reduce(kernel, y, lambda yy, k, wts: (wts * (k - yy) ** nu).sum(axis=1))
    return _scalar_or_array(vals, u)


# --------------------------------------------------------------------------
# Mellin transforms
# --------------------------------------------------------------------------

def _gauss(func, a, b, rule):
    x, w = rule
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return half * (func(pts) * w[None, :]).sum(axis=1)


def integrate_log(kernel, s, lower=-math.inf, upper=math.inf, tol=1e-10, max_rounds=60):
    """int chi(e^x) e^{s x} dx over [lower, upper] in the log domain.

    Panels are split at the kernel breakpoints, then bisected until the 10- and
    20-point Gauss-Legendre estimates agree to a share of ``tol`` proportional to
    panel width.
    """
    s = complex(s)
    lo, hi = kernel.support_log
    a0, b0 = max(lower, lo), min(upper, hi)
    if not a0 < b0:
        return 0j
    cuts = np.asarray(kernel.breakpoints_log(), dtype=float)
    edges = np.unique(np.concatenate([[a0, b0], cuts[(cuts > a0) & (cuts < b0)]]))
    a, b = edges[:-1], edges[1:]
    width = b0 - a0

    def integrand(x):
        return kernel.eval_log(x) * np.exp(s * x)

    pieces = []
    for _ in range(max_rounds):
        fine = _gauss(integrand, a, b, _GL20)
        coarse = _gauss(integrand, a, b, _GL10)
        ok = np.abs(fine - coarse) <= tol * (b - a) / width
        pieces.append(fine[ok])
        if ok.all():
            total = np.concatenate(pieces)
            return complex(math.fsum(total.real), math.fsum(total.imag))
        a, b = a[~ok], b[~ok]
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
    raise NumericalError(
        f"Mellin quadrature at s={s} did not reach tol={tol:g}; "
        f"{a.size} panels unresolved near x in [{a.min():.6g}, {b.max():.6g}]"
    )


def mellin_transform(kernel, s, tol=1e-10):
    """int_0^inf y^{s-1} chi(y) dy, computed as int chi(e^x) e^{s x} dx."""
    s = complex(s)
    if isinstance(kernel, Jackson) and s.real != 0.0:
        raise DomainError("Jackson kernels (c = 0) are only Mellin-integrable on Re(s) = 0")
    return integrate_log(kernel, s, tol=tol)


@dataclass
class HalfLineCheck:
    ks: list
    lower: list  # int_0^1 chi(u) u^{2 k pi i} du/u
    upper: list  # int_1^inf chi(u) u^{2 k pi i} du/u
    alpha: float
    chi_at_one: float
    hypothesis_ok: bool
    lower_pass: bool
    upper_pass: bool
    tol: float = 1e-8

    @property
    def passed(self):
        return self.hypothesis_ok and self.lower_pass and self.upper_pass


def verify_half_line_conditions(kernel, K, tol=1e-8):
    """Half-line Mellin integrals at s = 2 k pi i, k = -K..K.

    The lower integrals must vanish for k != 0 (their k = 0 value is the jump
    weight alpha); the upper ones must vanish for k != 0 and equal 1 - alpha at
    k = 0. A warning is issued when chi(1) != 0.
    """
    chi1 = float(kernel.eval_log(0.0))
    hypothesis_ok = chi1 == 0.0
    if not hypothesis_ok:
        warnings.warn(f"kernel has chi(1) = {chi1:.6g} != 0; the half-line criterion does not apply",
                      RuntimeWarning, stacklevel=2)
    ks = list(range(-K, K + 1))

    def conjugate_pairs(**limits):
        half = [integrate_log(kernel, 2j * math.pi * k, **limits) for k in range(K + 1)]
        return [v.conjugate() for v in half[:0:-1]] + half

    lower = conjugate_pairs(upper=0.0)
    upper = conjugate_pairs(lower=0.0)
    alpha = lower[K].real
    lower_pass = all(abs(v) <= tol for k, v in zip(ks, lower) if k != 0)
    upper_pass = (all(abs(v) <= tol for k, v in zip(ks, upper) if k != 0)
                  and abs(upper[K] - (1.0 - alpha)) <= tol)
    return HalfLineCheck(ks, lower, upper, alpha, chi1, hypothesis_ok, lower_pass, upper_pass, tol)


# --------------------------------------------------------------------------
# Aggregate report
# --------------------------------------------------------------------------

NON_CONSTANT = "non-constant"


@dataclass
class KernelReport:
    partition_max_residual: float
    chi_at_one: float
    M0: float
    M_nu: float
    nu: float
    psi_minus_at_one: float
    psi_minus_fundamental: list = field(repr=False)
    alpha_estimate: object  # float, or NON_CONSTANT
    mellin_at_2kpi: dict = field(repr=False)
    psi_spread: float = 0.0

    @property
    def alpha_is_constant(self):
        return self.alpha_estimate != NON_CONSTANT

    def to_items(self):
        items = [
            ("partition_max_residual", self.partition_max_residual),
            ("chi_at_one", self.chi_at_one),
            ("M0", self.M0),
            ("nu", self.nu),
            ("M_nu", self.M_nu),
            ("psi_minus_at_one", self.psi_minus_at_one),
            ("psi_minus_spread", self.psi_spread),
            ("alpha_estimate", self.alpha_estimate),
        ]
        for k, v in sorted(self.mellin_at_2kpi.items()):
            items.append((f"mellin_re[{k}]", v.real))
            items.append((f"mellin_im[{k}]", v.imag))
        return items

    def to_text(self):
        return "\n".join(f"{key} = {_fmt(val)}" for key, val in self.to_items()) + "\n"

    def to_csv(self):
        """Two-column CSV (key, value) with a header row."""
        from .io import rows_to_csv

        return rows_to_csv(({"key": k, "value": v} for k, v in self.to_items()), ["key", "value"])


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def check_kernel_conditions(kernel, nu=0.5, K=5, grid_size=None, scan_size=1001, const_tol=1e-9):
    """Partition of unity, moments, psi^- constancy on (1, e) and Mellin samples."""
    _warn_divergent_moment(kernel, nu)
    y = np.linspace(0.0, 1.0, default_grid_size(kernel, grid_size) + 1)

    def reducer(yy, k, wts):
        mag = np.abs(wts)
        return wts.sum(axis=1), mag.sum(axis=1), (mag * np.abs(k - yy) ** nu).sum(axis=1)

    total, m0_u, mnu_u = _lattice_reduce(kernel, y, reducer, n_out=3)
    residual = float(np.max(np.abs(total - 1.0)))
    m0, mnu = float(m0_u.max()), float(mnu_u.max())

    scan = np.linspace(0.0, 1.0, scan_size + 1)[1:-1]
    psi = psi_minus_log(kernel, scan)
    spread = float(psi.max() - psi.min())
    alpha = float(psi.mean()) if spread < const_tol else NON_CONSTANT

    # chi is real, so the transform at -2 pi i k is the conjugate of the one at 2 pi i k
    mellin = {k: mellin_transform(kernel, 2j * math.pi * k) for k in range(K + 1)}
    mellin.update({-k: mellin[k].conjugate() for k in range(1, K + 1)})
    return KernelReport(
        partition_max_residual=residual,
        chi_at_one=float(kernel.eval_log(0.0)),
        M0=m0,
        M_nu=mnu,
        nu=nu,
        psi_minus_at_one=float(psi_minus_log(kernel, 0.0)[0]),
        psi_minus_fundamental=list(zip(np.exp(scan).tolist(), psi.tolist())),
        alpha_estimate=alpha,
        mellin_at_2kpi=mellin,
        psi_spread=spread,
    )
