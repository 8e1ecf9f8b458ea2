"""Kernels on the positive half-line.

Every kernel is stored and evaluated in the log domain: ``kernel.eval_log(y)``
returns chi(e^y). Working in log coordinates keeps the node arithmetic of the
sampling series exact (the argument e^{-k} t^w becomes w*log(t) - k) and makes
B-spline knots sit at half-integers.

Three families are provided:

* :class:`BSpline`   -- Mellin B-spline of order n, compact support [-n/2, n/2].
* :class:`Jackson`   -- Mellin-Jackson kernel d * sinc^{2 beta}(y / (2 gamma beta pi)),
  truncated to an effective support whose neglected tail is below ``trunc_epsilon``.
* :class:`Combined`  -- (1 - alpha) chi_a(2u e^{-a-1}) + alpha chi_b(2u e^{b}),
  which vanishes at u = 1.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import comb

from .exceptions import DomainError, KernelConstructionError, NumericalError

LOG2 = math.log(2.0)

# Gauss-Legendre rule reused by the normalization quadrature.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(30)


def _as_positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} must be positive, got {x!r}")
    return arr


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(np.asarray(value).reshape(-1)[0])
    return value


# --------------------------------------------------------------------------
# Mellin B-splines
# --------------------------------------------------------------------------

def _bspline_log(n, y):
    y = np.asarray(y, dtype=float)
    half = n / 2.0
    out = np.zeros_like(y)
    if n == 1:
        out[(y >= -0.5) & (y < 0.5)] = 1.0
        return out
    inside = np.abs(y) < half
    if not np.any(inside):
        return out
    # Evaluate on the left half (B_n is even in y); fewer active truncated
    # powers there, so less cancellation near the right edge.
    lft = -np.abs(y[inside])
    acc = np.zeros_like(lft)
    for j in range(n + 1):
        base = half + lft - j
        acc += (-1) ** j * comb(n, j, exact=True) * np.where(base > 0, base, 0.0) ** (n - 1)
    acc /= math.factorial(n - 1)
    out[inside] = np.maximum(acc, 0.0)
    return out


def bspline_eval(n, x):
    """Mellin B-spline of order ``n`` at ``x > 0``.

    Uses the truncated-power form with exponent n - 1 and prefactor 1/(n-1)!,
    which reproduces B_2(x) = 1 - |log x| on (1/e, e).
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"order must be a positive integer, got {n!r}")
    arr = _as_positive(x)
    return _scalar_or_array(_bspline_log(int(n), np.log(arr)), x)


@dataclass(frozen=True)
class BSpline:
    order: int

    def __post_init__(self):
        if not isinstance(self.order, (int, np.integer)) or self.order < 1:
            raise DomainError(f"B-spline order must be a positive integer, got {self.order!r}")

    @property
    def support_log(self):
        return (-self.order / 2.0, self.order / 2.0)

    def eval_log(self, y):
        return _bspline_log(self.order, y)

    def breakpoints_log(self):
        return np.arange(self.order + 1) - self.order / 2.0

    @property
    def declaration(self):
        return f"bspline({self.order})"

    def __call__(self, u):
        return eval_kernel(self, u)


# --------------------------------------------------------------------------
# Mellin-Jackson kernels
# --------------------------------------------------------------------------

def _cos_tail(freq, p, N):
    """int_N^inf cos(freq s) s^{-p} ds for integer N and freq a multiple of 2 pi.

    Repeated integration by parts; sin(freq N) = 0 and cos(freq N) = 1 leave
    sum_m (-1)^m p (p+1) ... (p+2m) freq^{-2m-2} N^{-p-2m-1}.
    """
    total = 0.0
    coef = float(p)
    for m in range(40):
        term = (-1) ** m * coef / freq ** (2 * m + 2) * N ** (-p - 2 * m - 1)
        total += term
        if abs(term) < 1e-300 or abs(term) < 1e-17 * abs(total):
            return total
        coef *= (p + 2 * m + 1) * (p + 2 * m + 2)
    raise NumericalError(f"tail series for frequency {freq:.6g}, power {p} did not converge")


def _sinc_power_integral(beta, n_panels=400):
    """Integral of sinc^{2 beta}(z) over the real line, sinc(z) = sin(pi z)/(pi z).

    Unit panels on [0, N] with Gauss-Legendre, plus the tail from the expansion
    sin^{2b} = 2^{-2b} [C(2b,b) + 2 sum_j (-1)^{b-j} C(2b,j) cos(2(b-j)x)].
    """
    p = 2 * beta
    left = np.arange(n_panels, dtype=float)[:, None]
    z = left + 0.5 * (_GL_X[None, :] + 1.0)
    head = float(np.sum(0.5 * _GL_W[None, :] * np.sinc(z) ** p))

    N = float(n_panels)
    scale = math.pi ** (-p) * 2.0 ** (-p)
    tail = scale * comb(p, beta, exact=True) * N ** (1 - p) / (p - 1)
    for j in range(beta):
        freq = 2.0 * (beta - j) * math.pi
        tail += scale * 2.0 * (-1) ** (beta - j) * comb(p, j, exact=True) * _cos_tail(freq, p, N)
    return 2.0 * (head + tail)


@functools.lru_cache(maxsize=None)
def jackson_normalization(gamma, beta):
    """Normalizing constant d_{gamma,beta} of the Mellin-Jackson kernel.

    d^{-1} = int sinc^{2 beta}(y / (2 gamma beta pi)) dy over the log domain,
    which equals 2 gamma beta pi times the integral of sinc^{2 beta}.
    """
    if not gamma >= 1:
        raise DomainError(f"gamma must be >= 1, got {gamma!r}")
    if not isinstance(beta, (int, np.integer)) or beta < 1:
        raise DomainError(f"beta must be a positive integer, got {beta!r}")
    integral = 2.0 * gamma * beta * math.pi * _sinc_power_integral(int(beta))
    if not (np.isfinite(integral) and integral > 0):
        raise NumericalError(f"normalization integral is {integral!r} for gamma={gamma}, beta={beta}")
    return 1.0 / integral


def jackson_tail_radius(gamma, beta, normalization, epsilon):
    """Log radius R beyond which sum_k |chi| is below ``epsilon``.

    From |sinc(z)|^{2b} <= (pi |z|)^{-2b} the two-sided tail is at most
    2 d (2 gamma beta)^{2b} (R - 1)^{1 - 2b} / (2b - 1).
    """
    p = 2 * beta
    c = 2.0 * normalization * (2.0 * gamma * beta) ** p / (p - 1)
    return 1.0 + (c / epsilon) ** (1.0 / (p - 1))


def jackson_tail_bound(gamma, beta, normalization, radius):
    p = 2 * beta
    if radius <= 1.0:
        return math.inf
    return 2.0 * normalization * (2.0 * gamma * beta) ** p * (radius - 1.0) ** (1 - p) / (p - 1)


@dataclass(frozen=True)
class Jackson:
    """Mellin-Jackson kernel with weight exponent c = 0.

    ``max_log_radius`` caps the truncation radius; heavy-tailed kernels
    (beta = 1) would otherwise need ~1e10 terms for a 1e-10 tail. When the cap
    binds, a warning is emitted and ``tail_bound`` records the tail actually
    neglected.
    """

    gamma: float = 1.0
    beta: int = 1
    trunc_epsilon: float = 1e-10
    max_log_radius: float = 1e4
    normalization: float = field(init=False, compare=False, repr=False)
    effective_log_radius: float = field(init=False, compare=False, repr=False)
    tail_bound: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.trunc_epsilon > 0:
            raise DomainError(f"trunc_epsilon must be positive, got {self.trunc_epsilon!r}")
        d = jackson_normalization(self.gamma, self.beta)
        radius = jackson_tail_radius(self.gamma, self.beta, d, self.trunc_epsilon)
        if radius > self.max_log_radius:
            radius = float(self.max_log_radius)
            warnings.warn(
                f"Jackson(gamma={self.gamma}, beta={self.beta}) truncated at log radius {radius:g}; "
                f"neglected tail <= {jackson_tail_bound(self.gamma, self.beta, d, radius):.3g} "
                f"(requested {self.trunc_epsilon:g})",
                RuntimeWarning,
                stacklevel=3,
            )
        object.__setattr__(self, "normalization", d)
        object.__setattr__(self, "effective_log_radius", float(radius))
        object.__setattr__(self, "tail_bound", jackson_tail_bound(self.gamma, self.beta, d, radius))

    @property
    def support_log(self):
        r = self.effective_log_radius
        return (-r, r)

    def eval_log(self, y):
        y = np.asarray(y, dtype=float)
        x = y / (2.0 * self.gamma * self.beta)
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.sin(x) / x
        s = np.where(x == 0.0, 1.0, s)
        out = self.normalization * s ** (2 * self.beta)
        return np.where(np.abs(y) <= self.effective_log_radius, out, 0.0)

    def breakpoints_log(self):
        r = self.effective_log_radius
        step = 2.0 * self.gamma * self.beta * math.pi
        m = math.floor(r / step)
        zeros = step * np.arange(-m, m + 1)
        return np.unique(np.concatenate([[-r], zeros, [r]]))

    @property
    def declaration(self):
        extra = ""
        if self.trunc_epsilon != 1e-10:
            extra += f", trunc_epsilon={self.trunc_epsilon!r}"
        if self.max_log_radius != 1e4:
            extra += f", max_log_radius={self.max_log_radius!r}"
        return f"jackson(gamma={self.gamma!r}, beta={self.beta}{extra})"

    def __call__(self, u):
        return eval_kernel(self, u)


def jackson_eval(spec, x):
    """Value of a :class:`Jackson` kernel at ``x > 0`` (zero beyond its effective support)."""
    arr = _as_positive(x)
    return _scalar_or_array(spec.eval_log(np.log(arr)), x)


# --------------------------------------------------------------------------
# Combined kernels with chi(1) = 0
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Combined:
    alpha: float
    inner_a: "KernelSpec"
    a: float
    inner_b: "KernelSpec"
    b: float

    @property
    def shift_a(self):
        # log of u -> 2 u e^{-a-1}
        return LOG2 - self.a - 1.0

    @property
    def shift_b(self):
        # log of u -> 2 u e^{b}
        return LOG2 + self.b

    @property
    def support_a(self):
        lo, hi = self.inner_a.support_log
        return (lo - self.shift_a, hi - self.shift_a)

    @property
    def support_b(self):
        lo, hi = self.inner_b.support_log
        return (lo - self.shift_b, hi - self.shift_b)

    @property
    def support_log(self):
        sa, sb = self.support_a, self.support_b
        return (min(sa[0], sb[0]), max(sa[1], sb[1]))

    def eval_log(self, y):
        y = np.asarray(y, dtype=float)
        return ((1.0 - self.alpha) * self.inner_a.eval_log(y + self.shift_a)
                + self.alpha * self.inner_b.eval_log(y + self.shift_b))

    def breakpoints_log(self):
        return np.unique(np.concatenate([
            self.inner_a.breakpoints_log() - self.shift_a,
            self.inner_b.breakpoints_log() - self.shift_b,
        ]))

    @property
    def declaration(self):
        return (f"combined(alpha={self.alpha!r}, a={self.a!r}, inner_a={self.inner_a.declaration}, "
                f"b={self.b!r}, inner_b={self.inner_b.declaration})")

    def __call__(self, u):
        return eval_kernel(self, u)


KernelSpec = Union[BSpline, Jackson, Combined]


def _check_inner(inner, radius, label, scan_points):
    if not radius > 0:
        raise KernelConstructionError(f"{label}: radius must be positive, got {radius!r}")
    lo, hi = inner.support_log
    if lo < -radius - 1e-12 or hi > radius + 1e-12:
        raise KernelConstructionError(
            f"{label}: inner kernel support [{lo:g}, {hi:g}] (log domain) exceeds "
            f"the declared interval [{-radius:g}, {radius:g}]"
        )
    # Grid scan just outside the declared radius.
    band = np.concatenate([
        np.linspace(-radius - 1.0, -radius, scan_points, endpoint=False),
        np.linspace(radius, radius + 1.0, scan_points + 1)[1:],
    ])
    if np.any(inner.eval_log(band) != 0.0):
        raise KernelConstructionError(f"{label}: inner kernel is nonzero outside [e^-{radius:g}, e^{radius:g}]")


def build_combined(inner_a, a, inner_b, b, alpha, scan_points=2000):
    """Kernel (1 - alpha) chi_a(2u e^{-a-1}) + alpha chi_b(2u e^{b}).

    ``inner_a`` must vanish outside [e^{-a}, e^{a}] and ``inner_b`` outside
    [e^{-b}, e^{b}]. The result vanishes at u = 1, carries mass alpha on
    u < 1 and 1 - alpha on u > 1.
    """
    _check_inner(inner_a, a, "inner_a", scan_points)
    _check_inner(inner_b, b, "inner_b", scan_points)
    kernel = Combined(alpha=float(alpha), inner_a=inner_a, a=float(a), inner_b=inner_b, b=float(b))
    sa, sb = kernel.support_a, kernel.support_b
    if sa[0] <= 0.0 <= sa[1] or sb[0] <= 0.0 <= sb[1]:
        raise KernelConstructionError(f"shifted supports {sa}, {sb} cover u = 1")
    near_one = np.linspace(-1e-6, 1e-6, 201)
    if np.any(kernel.eval_log(near_one) != 0.0):
        raise KernelConstructionError("combined kernel does not vanish around u = 1")
    return kernel


def combined_reference_kernel():
    """chi(t) = 1/4 B_2(2t e^{-2}) + 3/4 B_2(2t e): jump limit weight alpha = 3/4."""
    return build_combined(BSpline(2), 1.0, BSpline(2), 1.0, 0.75)


def eval_kernel(kernel, u):
    """chi(u) for any kernel family; exact zero outside ``kernel.support_log``."""
    arr = _as_positive(u, "u")
    return _scalar_or_array(kernel.eval_log(np.log(arr)), u)
