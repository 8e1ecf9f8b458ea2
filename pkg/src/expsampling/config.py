"""Experiment configuration: an INI-style text format with three sections.

Example::

    [kernel]
    spec = combined(alpha=0.75, a=1.0, inner_a=bspline(2), b=1.0, inner_b=bspline(2))

    [signal]
    name = three-jump
    breakpoints = 3/2, 7/2, 11/2
    piece0 = 11/(2*t**2+1)
    piece1 = 3
    piece2 = 2
    piece3 = 12/(1+2*t)
    window = 0.5, 8

    [experiment]
    w = 5, 10, 20, 50, 100, 200
    t = 3/2
    seed = 0

``spec`` accepts a built-in name (see ``BUILTIN_KERNELS``) or a declaration.
A ``[signal]`` section holding only ``builtin = NAME`` selects a built-in
signal. Every error is reported with the line it comes from.
"""

from __future__ import annotations

import ast
import configparser
import dataclasses
import re
from dataclasses import dataclass, field

from .exceptions import ConfigError
from .kernels import BSpline, Jackson, build_combined, combined_reference_kernel
from .signals import (
    PiecewiseSignal,
    linear_signal,
    log_signal,
    parse_expression,
    parse_number,
    three_jump_signal,
    unit_step,
)

BUILTIN_KERNELS = {
    "paper-combo": combined_reference_kernel,
    "bspline2": lambda: BSpline(2),
    "bspline3": lambda: BSpline(3),
    "jackson": lambda: Jackson(1.0, 1),
}

BUILTIN_SIGNALS = {
    "three-jump": three_jump_signal,
    "step2": lambda: unit_step(2.0),
    "log": log_signal,
    "linear": linear_signal,
}

# key -> (converter, is_list)
_EXPERIMENT_KEYS = {
    "w": (float, True),
    "t": (float, True),
    "seed": (int, False),
    "tol": (float, False),
    "align_tol": (float, False),
    "nu": (float, False),
    "xi": (float, False),
    "rho": (float, False),
    "trials": (int, False),
    "grid": (int, False),
    "m_max": (int, False),
    "mode": (str, False),
    "out": (str, False),
}


# --------------------------------------------------------------------------
# Kernel declarations
# --------------------------------------------------------------------------

def _number(node, text):
    return parse_number(ast.get_source_segment(text, node))


def _build_kernel(node, text):
    if not (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)):
        raise ValueError(f"expected a kernel call, got {ast.get_source_segment(text, node)!r}")
    name = node.func.id
    kwargs = {kw.arg: kw.value for kw in node.keywords}
    if None in kwargs:
        raise ValueError("'**' is not allowed in kernel declarations")
    if name == "bspline":
        if len(node.args) != 1 or kwargs:
            raise ValueError("bspline takes exactly one positional order, e.g. bspline(2)")
        order = _number(node.args[0], text)
        if order != int(order):
            raise ValueError(f"bspline order must be an integer, got {order!r}")
        return BSpline(int(order))
    if name == "jackson":
        names = ("gamma", "beta", "trunc_epsilon", "max_log_radius")
        params = dict(zip(names, node.args))
        if len(node.args) > len(names) or set(kwargs) - set(names) or set(kwargs) & set(params):
            raise ValueError(f"jackson accepts {', '.join(names)}")
        params.update(kwargs)
        values = {k: _number(v, text) for k, v in params.items()}
        if "beta" in values:
            if values["beta"] != int(values["beta"]):
                raise ValueError(f"jackson beta must be an integer, got {values['beta']!r}")
            values["beta"] = int(values["beta"])
        return Jackson(**values)
    if name == "combined":
        names = {"alpha", "a", "inner_a", "b", "inner_b"}
        if node.args or set(kwargs) != names:
            raise ValueError(f"combined needs keyword arguments {', '.join(sorted(names))}")
        return build_combined(
            _build_kernel(kwargs["inner_a"], text), _number(kwargs["a"], text),
            _build_kernel(kwargs["inner_b"], text), _number(kwargs["b"], text),
            _number(kwargs["alpha"], text),
        )
    raise ValueError(f"unknown kernel kind {name!r} (expected bspline, jackson or combined)")


def parse_kernel(text):
    """A kernel from a built-in name or a declaration such as ``jackson(gamma=1, beta=2)``."""
    text = str(text).strip()
    if text in BUILTIN_KERNELS:
        return BUILTIN_KERNELS[text]()
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse kernel declaration {text!r}: {exc.msg}") from None
    return _build_kernel(tree.body, text)


# --------------------------------------------------------------------------
# Config object
# --------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    kernel: object = None
    signal: PiecewiseSignal = None
    ws: tuple = ()
    ts: tuple = ()
    seed: int = 0
    tol: float = None
    align_tol: float = 1e-9
    nu: float = 0.5
    xi: float = 1e-3
    rho: float = 1e-4
    trials: int = 10
    grid: int = 1000
    m_max: int = 40
    mode: str = "uniform"
    out: str = None
    kernel_name: str = None
    signal_name: str = None
    lines: dict = field(default_factory=dict, repr=False, compare=False)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _line_index(text):
    """(section, key) -> line number, and section -> line number of its header."""
    index = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            index.setdefault((section, None), lineno)
            continue
        m = re.match(r"([^=:]+)[=:]", line)
        if m and section is not None and not raw[:1].isspace():
            index[(section, m.group(1).strip().lower())] = lineno
    return index


def _split_list(value):
    return [p.strip() for p in value.split(",") if p.strip()]


def _parse_signal(sec, where):
    keys = set(sec)
    if "builtin" in keys:
        extra = keys - {"builtin"}
        if extra:
            raise ConfigError(f"[signal] with 'builtin' takes no other keys, found {sorted(extra)}",
                              where("builtin"))
        name = sec["builtin"].strip()
        if name not in BUILTIN_SIGNALS:
            raise ConfigError(f"unknown built-in signal {name!r}; choose from {sorted(BUILTIN_SIGNALS)}",
                              where("builtin"))
        return BUILTIN_SIGNALS[name](), name
    try:
        bps = tuple(parse_number(x) for x in _split_list(sec.get("breakpoints", "")))
    except ValueError as exc:
        raise ConfigError(str(exc), where("breakpoints")) from None
    piece_keys = sorted((k for k in keys if re.fullmatch(r"piece\d+", k)), key=lambda k: int(k[5:]))
    expected = [f"piece{i}" for i in range(len(bps) + 1)]
    if piece_keys != expected:
        raise ConfigError(f"{len(bps)} breakpoints need keys {', '.join(expected)}; found {piece_keys}",
                          where(None))
    kwargs = {"name": sec.get("name", "custom").strip()}
    if "window" in sec:
        try:
            window = tuple(parse_number(x) for x in _split_list(sec["window"]))
        except ValueError as exc:
            raise ConfigError(str(exc), where("window")) from None
        if len(window) != 2:
            raise ConfigError("window needs two numbers 'lo, hi'", where("window"))
        kwargs["window"] = window
    if "point_values" in sec:
        try:
            pairs = []
            for item in _split_list(sec["point_values"]):
                at, _, value = item.partition("->")
                pairs.append((parse_number(at), parse_number(value)))
        except ValueError as exc:
            raise ConfigError(f"point_values entries look like '3/2 -> 1': {exc}", where("point_values")) from None
        kwargs["point_values"] = tuple(pairs)
    unknown = keys - {"name", "breakpoints", "window", "point_values"} - set(piece_keys)
    if unknown:
        raise ConfigError(f"unknown [signal] keys {sorted(unknown)}", where(sorted(unknown)[0]))
    for key in piece_keys:
        try:
            parse_expression(sec[key])
        except ValueError as exc:
            raise ConfigError(str(exc), where(key)) from None
    try:
        return PiecewiseSignal(bps, tuple(sec[k] for k in piece_keys), **kwargs), None
    except ValueError as exc:
        raise ConfigError(str(exc), where(None)) from None


def load_config(text):
    """Parse configuration text into an :class:`ExperimentConfig`."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=None)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("text before the first [section] header", exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse {line.strip()!r}", lineno) from None

    index = _line_index(text)
    cfg = ExperimentConfig(lines=index)
    for section in parser.sections():
        if section.lower() not in ("kernel", "signal", "experiment"):
            raise ConfigError(f"unknown section [{section}]", index.get((section.lower(), None)))

    def locator(section):
        def where(key):
            return index.get((section, key), index.get((section, None)))
        return where

    if parser.has_section("kernel"):
        sec = parser["kernel"]
        where = locator("kernel")
        unknown = set(sec) - {"spec"}
        if unknown or "spec" not in sec:
            raise ConfigError("[kernel] needs exactly one key, 'spec'", where(None))
        try:
            cfg.kernel = parse_kernel(sec["spec"])
        except ValueError as exc:
            raise ConfigError(str(exc), where("spec")) from None
        name = sec["spec"].strip()
        cfg.kernel_name = name if name in BUILTIN_KERNELS else None

    if parser.has_section("signal"):
        cfg.signal, cfg.signal_name = _parse_signal(parser["signal"], locator("signal"))

    if parser.has_section("experiment"):
        sec = parser["experiment"]
        where = locator("experiment")
        for key, raw in sec.items():
            if key not in _EXPERIMENT_KEYS:
                raise ConfigError(f"unknown [experiment] key {key!r}", where(key))
            conv, is_list = _EXPERIMENT_KEYS[key]
            try:
                if conv is str:
                    value = raw.strip()
                elif is_list:
                    value = tuple(parse_number(x) for x in _split_list(raw))
                elif conv is int:
                    value = int(raw.strip())
                else:
                    value = parse_number(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}", where(key)) from None
            attr = {"w": "ws", "t": "ts"}.get(key, key)
            setattr(cfg, attr, value)
        if cfg.mode not in ("uniform", "adversarial"):
            raise ConfigError(f"mode must be 'uniform' or 'adversarial', got {cfg.mode!r}", where("mode"))
    return cfg


def read_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    return load_config(text)


def dump_config(cfg):
    """Serialize a config so that :func:`load_config` rebuilds an equivalent one."""
    out = []
    if cfg.kernel is not None:
        out += ["[kernel]", f"spec = {cfg.kernel_name or cfg.kernel.declaration}", ""]
    if cfg.signal is not None:
        f = cfg.signal
        out.append("[signal]")
        if cfg.signal_name:
            out.append(f"builtin = {cfg.signal_name}")
        else:
            out.append(f"name = {f.name}")
            out.append("breakpoints = " + ", ".join(repr(b) for b in f.breakpoints))
            out += [f"piece{i} = {p}" for i, p in enumerate(f.pieces)]
            out.append(f"window = {f.window[0]!r}, {f.window[1]!r}")
            if f.point_values:
                out.append("point_values = " + ", ".join(f"{a!r} -> {v!r}" for a, v in f.point_values))
        out.append("")
    out.append("[experiment]")
    if cfg.ws:
        out.append("w = " + ", ".join(repr(float(w)) for w in cfg.ws))
    if cfg.ts:
        out.append("t = " + ", ".join(repr(float(t)) for t in cfg.ts))
    for key in ("seed", "tol", "align_tol", "nu", "xi", "rho", "trials", "grid", "m_max", "mode", "out"):
        value = getattr(cfg, key)
        if value is not None:
            out.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(out) + "\n"
