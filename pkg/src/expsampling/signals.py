"""Bounded piecewise signals on the positive half-line.

A signal is a list of breakpoints t_1 < ... < t_m and m + 1 closed-form piece
formulas in the variable ``t``. Piece i lives on [t_i, t_{i+1}) (left-closed,
right-open), so at a jump the signal takes its right limit unless an explicit
point value overrides it.

Piece formulas use a small expression language: numbers, ``t``, ``pi``, ``e``,
``+ - * / **``, and the functions listed in ``FUNCTIONS``. Expressions are parsed
with :mod:`ast` and translated node by node to sympy; nothing is ``eval``-ed.
"""

from __future__ import annotations

import ast
import functools
import math
from dataclasses import dataclass, field

import numpy as np
import sympy
from scipy import optimize
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .exceptions import DomainError

T = sympy.Symbol("t", positive=True)

FUNCTIONS = {
    "log": sympy.log,
    "exp": sympy.exp,
    "sqrt": sympy.sqrt,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "tan": sympy.tan,
    "atan": sympy.atan,
    "tanh": sympy.tanh,
    "abs": sympy.Abs,
}
CONSTANTS = {"pi": sympy.pi, "e": sympy.E, "t": T}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a ** b,
}


def _to_sympy(node, source):
    if isinstance(node, ast.Expression):
        return _to_sympy(node.body, source)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return sympy.Rational(ast.get_source_segment(source, node) or repr(node.value))
    if isinstance(node, ast.Name):
        if node.id not in CONSTANTS:
            raise ValueError(f"unknown name {node.id!r} in expression {source!r}")
        return CONSTANTS[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_to_sympy(node.left, source), _to_sympy(node.right, source))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _to_sympy(node.operand, source)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        if node.func.id not in FUNCTIONS or len(node.args) != 1:
            raise ValueError(f"unsupported function call {ast.get_source_segment(source, node)!r}")
        return FUNCTIONS[node.func.id](_to_sympy(node.args[0], source))
    raise ValueError(f"unsupported syntax {ast.get_source_segment(source, node)!r} in expression {source!r}")


def parse_expression(text):
    """Parse a piece formula into a sympy expression in ``t``."""
    source = str(text).strip()
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {source!r}: {exc.msg}") from None
    return _to_sympy(tree, source)


def parse_number(text):
    """A constant expression such as ``3/2`` or ``exp(1)`` as a float."""
    expr = parse_expression(text)
    if expr.free_symbols:
        raise ValueError(f"expected a constant, got {text!r}")
    return float(expr)


@functools.lru_cache(maxsize=4096)
def _compile(expr):
    fn = sympy.lambdify(T, expr, modules="numpy")

    def call(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape).astype(float)

    return call


@dataclass(frozen=True)
class JumpPoint:
    t: float
    left_limit: float
    right_limit: float
    value_at: float

    @property
    def removable(self):
        return self.left_limit == self.right_limit

    @property
    def size(self):
        return self.right_limit - self.left_limit


@dataclass(frozen=True)
class PiecewiseSignal:
    breakpoints: tuple
    pieces: tuple
    window: tuple = (0.5, 8.0)
    name: str = "custom"
    point_values: tuple = ()
    _exprs: tuple = field(init=False, repr=False, compare=False)
    _funcs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        pieces = tuple(str(p) for p in self.pieces)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "window", (float(self.window[0]), float(self.window[1])))
        object.__setattr__(self, "point_values", tuple((float(a), float(b)) for a, b in self.point_values))
        if any(b <= 0 for b in bps) or any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError(f"breakpoints must be positive and strictly increasing: {bps}")
        if len(pieces) != len(bps) + 1:
            raise ValueError(f"{len(bps)} breakpoints need {len(bps) + 1} pieces, got {len(pieces)}")
        lo, hi = self.window
        if not 0 < lo < hi:
            raise ValueError(f"window must satisfy 0 < lo < hi, got {self.window}")
        exprs = tuple(parse_expression(p) for p in pieces)
        object.__setattr__(self, "_exprs", exprs)
        object.__setattr__(self, "_funcs", tuple(_compile(e) for e in exprs))
        for t in bps:
            left, right = self.one_sided_limits(t)
            if not (math.isfinite(left) and math.isfinite(right)):
                raise ValueError(f"one-sided limits at t={t} are not finite: ({left}, {right})")

    @functools.cached_property
    def _derivs(self):
        return tuple(_compile(sympy.diff(e, T)) for e in self._exprs)

    # -- evaluation -------------------------------------------------------

    def piece_index(self, t):
        return np.searchsorted(self.breakpoints, t, side="right")

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(~(arr > 0)):
            raise DomainError(f"signal argument must be positive, got {t!r}")
        flat = np.atleast_1d(arr).ravel()
        idx = self.piece_index(flat)
        out = np.empty_like(flat)
        for i, fn in enumerate(self._funcs):
            sel = idx == i
            if sel.any():
                out[sel] = fn(flat[sel])
        for at, value in self.point_values:
            out[flat == at] = value
        out = out.reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    def derivative(self, t):
        """f'(t) taken inside the piece containing t (one-sided at breakpoints)."""
        flat = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
        idx = self.piece_index(flat)
        out = np.empty_like(flat)
        for i, fn in enumerate(self._derivs):
            sel = idx == i
            if sel.any():
                out[sel] = fn(flat[sel])
        return out.reshape(np.shape(t)) if np.ndim(t) else float(out[0])

    def one_sided_limits(self, t):
        """(f(t-0), f(t+0)) from the formulas of the adjacent pieces."""
        if not t > 0:
            raise DomainError(f"t must be positive, got {t!r}")
        left_piece = int(np.searchsorted(self.breakpoints, t, side="left"))
        right_piece = int(np.searchsorted(self.breakpoints, t, side="right"))
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(self._funcs[left_piece](t)), float(self._funcs[right_piece](t))

    def jumps(self):
        out = []
        for t in self.breakpoints:
            left, right = self.one_sided_limits(t)
            out.append(JumpPoint(t, left, right, self(t)))
        return out

    @property
    def continuous(self):
        return all(j.removable and j.value_at == j.left_limit for j in self.jumps())

    def pieces_on(self, lo, hi):
        """(index, a, b) for every piece meeting [lo, hi], clipped to it."""
        edges = (0.0,) + self.breakpoints + (math.inf,)
        out = []
        for i in range(len(self.pieces)):
            a, b = max(lo, edges[i]), min(hi, edges[i + 1])
            if a < b:
                out.append((i, a, b))
        return out


def eval_signal(f, t):
    return f(t)


def one_sided_limits(f, t):
    return f.one_sided_limits(t)


def build_h(f, t):
    """Auxiliary signal: f - f(t-0) left of t, f - f(t+0) right of t, and 0 at t.

    The returned signal is continuous at t with value 0.
    """
    left, right = f.one_sided_limits(t)
    bps = sorted(set(f.breakpoints) | {float(t)})
    edges = [0.0] + bps
    pieces = []
    for lo in edges:
        # piece of f active just right of lo
        src = f.pieces[int(np.searchsorted(f.breakpoints, lo, side="right"))]
        shift = left if lo < t else right
        pieces.append(f"({src}) - ({shift!r})")
    keep = tuple((a, v) for a, v in f.point_values if a != t)
    return PiecewiseSignal(
        tuple(bps), tuple(pieces), f.window, name=f"h[{f.name}@{t!r}]", point_values=keep + ((float(t), 0.0),),
    )


# --------------------------------------------------------------------------
# Norms and moduli on a window
# --------------------------------------------------------------------------

def _log_grid(lo, hi, grid):
    return np.exp(np.linspace(math.log(lo), math.log(hi), grid))


def log_modulus(f, delta, grid=4001, window=None, exact_delta=False):
    """omega(f, delta) = sup{|f(p) - f(q)| : |log p - log q| <= delta} on a log-uniform grid.

    The default grid is fixed, so the estimate is nondecreasing in delta and
    falls short of the true value by at most the variation of f over one grid
    step. ``exact_delta=True`` shrinks the spacing so that delta is an exact
    multiple of it: pairs at distance exactly delta are then sampled (log t
    gives delta itself), at the price of a grid that depends on delta.
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    lo, hi = window or f.window
    a, b = math.log(lo), math.log(hi)
    if delta >= b - a:
        vals = np.asarray(f(np.exp(np.linspace(a, b, grid))), dtype=float)
        return float(vals.max() - vals.min())
    if exact_delta:
        m = max(1, math.ceil(delta * (grid - 1) / (b - a)))
        h = delta / m
        logs = np.minimum(a + h * np.arange(math.ceil((b - a) / h) + 1), b)
    else:
        logs = np.linspace(a, b, grid)
        h = logs[1] - logs[0]
        m = int(math.floor(delta / h + 1e-9))
        if m <= 0:
            return 0.0
    vals = np.asarray(f(np.exp(logs)), dtype=float)
    size = m + 1
    spread = maximum_filter1d(vals, size, mode="nearest") - minimum_filter1d(vals, size, mode="nearest")
    return float(spread.max())


def _refined_sup(fn, pieces, grid):
    best = 0.0
    for a, b in pieces:
        xs = _log_grid(a, b, grid)
        vals = np.abs(fn(xs))
        i = int(np.argmax(vals))
        best = max(best, float(vals[i]))
        lo_x, hi_x = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        if hi_x > lo_x:
            res = optimize.minimize_scalar(lambda x: -abs(float(fn(np.array([x]))[0])),
                                           bounds=(lo_x, hi_x), method="bounded",
                                           options={"xatol": 1e-12 * hi_x})
            best = max(best, -float(res.fun))
    return best


def sup_norm(f, window=None, grid=4001):
    """sup |f| over the window: grid maximum per piece, refined by a bounded 1-D search."""
    lo, hi = window or f.window
    pieces = f.pieces_on(lo, hi)
    best = 0.0
    for i, a, b in pieces:
        best = max(best, _refined_sup(f._funcs[i], [(a, b)], grid))
    for at, value in f.point_values:
        if lo <= at <= hi:
            best = max(best, abs(value))
    return best


def derivative_sup(f, window=None, grid=4001):
    """sup |f'| over the window, computed piece by piece (jumps excluded)."""
    lo, hi = window or f.window
    best = 0.0
    for i, a, b in f.pieces_on(lo, hi):
        best = max(best, _refined_sup(f._derivs[i], [(a, b)], grid))
    return best


# --------------------------------------------------------------------------
# Signal corpus
# --------------------------------------------------------------------------

def three_jump_signal(window=(0.5, 8.0)):
    """Test signal with jumps at 3/2, 7/2 and 11/2."""
    return PiecewiseSignal(
        breakpoints=(1.5, 3.5, 5.5),
        pieces=("11/(2*t**2+1)", "3", "2", "12/(1+2*t)"),
        window=window,
        name="three-jump",
    )


def unit_step(at=2.0, window=(0.5, 8.0)):
    return PiecewiseSignal((at,), ("0", "1"), window, name=f"step{at:g}")


def constant_signal(c, window=(0.5, 8.0)):
    return PiecewiseSignal((), (repr(float(c)),), window, name=f"const{c:g}")


def log_signal(window=(1.0, math.e ** 2)):
    return PiecewiseSignal((), ("log(t)",), window, name="log")


def linear_signal(window=(1.0, 4.0)):
    return PiecewiseSignal((), ("t",), window, name="linear")


_FAMILIES = (
    "{a} + {b}*sin({c}*log(t))",
    "{a}/(1 + {c}*t)",
    "{a}*exp(-{c}*t) + {b}",
    "{a}*t/({c} + t)",
    "{a}*cos({c}*log(t))/(1 + log(t)**2) + {b}",
    "{a}*atan({c}*log(t)) + {b}",
)


def random_corpus(rng, n, window=(0.5, 8.0)):
    """``n`` bounded, log-uniformly continuous signals with random parameters.

    Every fourth signal is a continuous two-piece signal (matching values at
    the breakpoint, kink allowed).
    """
    out = []
    for i in range(n):
        a = round(float(rng.uniform(-3.0, 3.0)), 6)
        b = round(float(rng.uniform(-2.0, 2.0)), 6)
        c = round(float(rng.uniform(0.2, 3.0)), 6)
        form = _FAMILIES[i % len(_FAMILIES)].format(a=a, b=b, c=c)
        if i % 4 == 3:
            tb = round(float(rng.uniform(1.0, 5.0)), 6)
            base = PiecewiseSignal((), (form,), window)
            v = base(tb)
            slope = round(float(rng.uniform(-1.0, 1.0)), 6)
            second = f"{v!r} + {slope}*log(t/{tb!r})"
            out.append(PiecewiseSignal((tb,), (form, second), window, name=f"corpus{i}"))
        else:
            out.append(PiecewiseSignal((), (form,), window, name=f"corpus{i}"))
    return out
