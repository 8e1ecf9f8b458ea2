"""Quantitative error bounds for the sampling series and experiments against them.

Three bounds are covered:

* rate:      |S_w f - f| <= omega(f, w^-nu) [M_nu + 2 M_0] + 2^{nu+1} ||f|| M_nu w^-nu,  0 < nu < 1
* round-off: |S_w f - S_w fbar| <= xi M_0, and |f - S_w fbar| <= C omega(f, 1/w) + xi M_0
* jitter:    |S_w f - sum chi f(x_k + rho_k)| <= rho ||f'|| M_0, plus the analogous total bound

with C = M_0 + M_1. The total bounds assume f continuous and are reported as nan
for signals with jumps. Sups over t are taken on a log-uniform grid of the signal
window; norms and moduli of f are taken over the window widened to every node
the series touches.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analysis import _lattice_reduce, default_grid_size
from .exceptions import DomainError, JitterRejected
from .sampling import (
    _node_values,
    _row_fsum,
    evaluate_series,
    sample_nodes,
    series_terms,
)
from .signals import derivative_sup, log_modulus, sup_norm

REL_SLACK = 1e-9
ABS_SLACK = 1e-12


@functools.lru_cache(maxsize=128)
def kernel_moments(kernel, nus=(0.0, 1.0), grid_size=None):
    """Sup of M_nu(chi, u) over a log-grid of [1, e] for each nu, in one lattice pass."""
    y = np.linspace(0.0, 1.0, default_grid_size(kernel, grid_size) + 1)

    def reducer(yy, k, wts):
        mag = np.abs(wts)
        dist = np.abs(k - yy)
        return tuple((mag * dist ** nu).sum(axis=1) for nu in nus)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sums = _lattice_reduce(kernel, y, reducer, n_out=len(nus))
    return {nu: float(s.max()) for nu, s in zip(nus, sums)}


def node_window_extent(kernel, w, window):
    """Smallest interval containing every node e^{k/w} used for t in ``window``."""
    lo, hi = window
    s_lo, s_hi = kernel.support_log
    return (lo * math.exp(-s_hi / w), hi * math.exp(-s_lo / w))


def t_grid(window, grid):
    lo, hi = window
    return np.exp(np.linspace(math.log(lo), math.log(hi), grid))


def _within(value, bound):
    return value <= bound * (1.0 + REL_SLACK) + ABS_SLACK


@dataclass
class ErrorReport:
    kind: str
    bound: float
    empirical: float
    constituents: dict = field(default_factory=dict)
    total_bound: float = math.nan
    total_empirical: float = math.nan
    seed: object = None
    kernel_id: str = ""
    signal_id: str = ""

    @property
    def pass_main(self):
        return _within(self.empirical, self.bound)

    @property
    def pass_total(self):
        if math.isnan(self.total_bound):
            return True
        return _within(self.total_empirical, self.total_bound)

    @property
    def passed(self):
        return self.pass_main and self.pass_total

    @property
    def ratio(self):
        return self.empirical / self.bound if self.bound else math.nan

    def to_row(self):
        row = {
            "kind": self.kind,
            "kernel-id": self.kernel_id,
            "signal-id": self.signal_id,
            "seed": "" if self.seed is None else self.seed,
            "bound": self.bound,
            "empirical": self.empirical,
            "pass": self.pass_main,
            "total_bound": self.total_bound,
            "total_empirical": self.total_empirical,
            "total_pass": self.pass_total,
        }
        row.update(self.constituents)
        return row

    def to_text(self):
        from .io import format_value

        return "".join(f"{k} = {format_value(v)}\n" for k, v in self.to_row().items())


# --------------------------------------------------------------------------
# Rate of approximation
# --------------------------------------------------------------------------

def rate_bound(kernel, f, w, nu, window=None, grid=4001, moment_grid=None):
    """Value of the rate bound and its constituents, as ``(bound, constituents)``."""
    if not 0 < nu < 1:
        raise DomainError(f"nu must lie in (0, 1), got {nu!r}")
    if not w > 0:
        raise DomainError(f"w must be positive, got {w!r}")
    window = window or f.window
    ext = node_window_extent(kernel, w, window)
    moments = kernel_moments(kernel, (0.0, float(nu)), moment_grid)
    m0, mnu = moments[0.0], moments[float(nu)]
    delta = w ** (-nu)
    omega = log_modulus(f, delta, grid, ext, exact_delta=True)
    fsup = sup_norm(f, ext, grid)
    bound = omega * (mnu + 2.0 * m0) + 2.0 ** (nu + 1.0) * fsup * mnu * delta
    constituents = {"w": float(w), "nu": float(nu), "M_0": m0, "M_nu": mnu,
                    "omega": omega, "delta": delta, "sup_norm": fsup}
    return bound, constituents


def _jump_mask(kernel, f, ts, w):
    """False where the nodes feeding S_w f(t) straddle a jump of f (or t is one)."""
    lo, hi = kernel.support_log
    keep = np.ones(ts.shape, dtype=bool)
    for jump in f.jumps():
        if not (jump.removable and jump.value_at == jump.left_limit):
            offset = w * (np.log(ts) - math.log(jump.t))
            keep &= (offset < lo) | (offset > hi)
    return keep


def empirical_sup_error(kernel, f, w, window=None, grid=1000):
    """max |S_w f(t) - f(t)| on a log-grid, skipping t whose nodes straddle a jump."""
    ts = t_grid(window or f.window, grid)
    ts = ts[_jump_mask(kernel, f, ts, w)]
    if ts.size == 0:
        return 0.0
    return float(np.max(np.abs(evaluate_series(kernel, f, w, ts) - f(ts))))


def rate_experiment(kernel, f, w, nu, window=None, grid=1000, omega_grid=4001):
    bound, constituents = rate_bound(kernel, f, w, nu, window, omega_grid)
    empirical = empirical_sup_error(kernel, f, w, window, grid)
    return ErrorReport("rate", bound, empirical, constituents,
                       kernel_id=kernel.declaration, signal_id=f.name)


# --------------------------------------------------------------------------
# Round-off and jitter
# --------------------------------------------------------------------------

def _trial_generators(seed, trials):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _per_node(rng, k, scale):
    k_int = k.astype(np.int64)
    k_min = int(k_int.min())
    draws = rng.uniform(-scale, scale, size=int(k_int.max()) - k_min + 1)
    return draws[k_int - k_min]


def roundoff_experiment(kernel, f, w, xi, trials=10, seed=0, window=None, grid=1000,
                        mode="uniform", omega_grid=4001):
    """Perturb every sample by xi_k with |xi_k| <= xi and compare against xi M_0.

    ``mode="uniform"`` draws xi_k uniformly per node index (one draw per k, shared
    by every t) and per trial; ``mode="adversarial"`` uses xi_k = xi sign(chi(e^{-k} t^w)),
    which attains the bound for nonnegative kernels.
    """
    if not xi >= 0:
        raise DomainError(f"xi must be nonnegative, got {xi!r}")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    window = window or f.window
    ts = t_grid(window, grid)
    k, weights = series_terms(kernel, w, ts)
    vals = _node_values(f, k, w, weights)
    exact = _row_fsum(weights * vals)
    ft = f(ts)

    if mode == "adversarial":
        perturbations = [xi * np.sign(weights)]
    elif mode == "uniform":
        perturbations = [_per_node(rng, k, xi) for rng in _trial_generators(seed, trials)]
    else:
        raise DomainError(f"unknown mode {mode!r}")

    q_max = 0.0
    total_max = 0.0
    for pert in perturbations:
        perturbed = _row_fsum(weights * (vals - pert))
        q_max = max(q_max, float(np.max(np.abs(exact - perturbed))))
        total_max = max(total_max, float(np.max(np.abs(ft - perturbed))))

    moments = kernel_moments(kernel, (0.0, 1.0))
    m0, m1 = moments[0.0], moments[1.0]
    ext = node_window_extent(kernel, w, window)
    omega = log_modulus(f, 1.0 / w, omega_grid, ext, exact_delta=True)
    c = m0 + m1
    total_bound = c * omega + xi * m0 if f.continuous else math.nan
    return ErrorReport(
        "roundoff", xi * m0, q_max,
        {"w": float(w), "xi": float(xi), "M_0": m0, "M_1": m1, "C": c, "omega": omega,
         "mode": mode, "trials": len(perturbations)},
        total_bound=total_bound, total_empirical=total_max, seed=seed,
        kernel_id=kernel.declaration, signal_id=f.name,
    )


def _check_jitter(f, k, weights, nodes, shifted):
    mask = weights != 0.0
    if np.any(shifted[mask] <= 0):
        bad = k[mask][shifted[mask] <= 0][0]
        raise JitterRejected(f"perturbed node k={int(bad)} is not positive", int(bad))
    crossed = f.piece_index(nodes[mask]) != f.piece_index(shifted[mask])
    if np.any(crossed):
        i = int(np.argmax(crossed))
        bad = int(k[mask][i])
        raise JitterRejected(
            f"perturbed node k={bad} moved from {float(nodes[mask][i])!r} to {float(shifted[mask][i])!r} "
            f"across a breakpoint of {f.name}", bad)


def jitter_experiment(kernel, f, w, rho, trials=10, seed=0, window=None, grid=1000,
                      mode="uniform", omega_grid=4001):
    """Sample at e^{k/w} + rho_k with |rho_k| <= rho and compare against rho ||f'|| M_0.

    Draws that move a node across a breakpoint of f raise :class:`JitterRejected`:
    the bound relies on the mean value theorem between node and perturbed node.
    """
    if not rho >= 0:
        raise DomainError(f"rho must be nonnegative, got {rho!r}")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    window = window or f.window
    ts = t_grid(window, grid)
    k, weights = series_terms(kernel, w, ts)
    nodes = sample_nodes(k, w)
    vals = _node_values(f, k, w, weights)
    exact = _row_fsum(weights * vals)
    ft = f(ts)

    if mode == "adversarial":
        perturbations = [rho * np.sign(weights)]
    elif mode == "uniform":
        perturbations = [_per_node(rng, k, rho) for rng in _trial_generators(seed, trials)]
    else:
        raise DomainError(f"unknown mode {mode!r}")

    j_max = 0.0
    total_max = 0.0
    for pert in perturbations:
        _check_jitter(f, k, weights, nodes, nodes + pert)
        jittered = _row_fsum(weights * _node_values(f, k, w, weights, perturb=pert))
        j_max = max(j_max, float(np.max(np.abs(exact - jittered))))
        total_max = max(total_max, float(np.max(np.abs(ft - jittered))))

    ext = node_window_extent(kernel, w, window)
    if ext[0] - rho <= 0:
        raise DomainError("rho is too large: perturbed nodes may leave the positive half-line")
    dsup = derivative_sup(f, (ext[0] - rho, ext[1] + rho))
    moments = kernel_moments(kernel, (0.0, 1.0))
    m0, m1 = moments[0.0], moments[1.0]
    omega = log_modulus(f, 1.0 / w, omega_grid, ext, exact_delta=True)
    c = m0 + m1
    total_bound = c * omega + rho * dsup * m0 if f.continuous else math.nan
    return ErrorReport(
        "jitter", rho * dsup * m0, j_max,
        {"w": float(w), "rho": float(rho), "M_0": m0, "M_1": m1, "C": c, "omega": omega,
         "deriv_sup": dsup, "mode": mode, "trials": len(perturbations)},
        total_bound=total_bound, total_empirical=total_max, seed=seed,
        kernel_id=kernel.declaration, signal_id=f.name,
    )
