"""Discrete-time quantitative requirement semantics.

A requirement is a tree of atoms (bounds on one output signal), Boolean
connectives and bounded temporal operators.  Robustness follows the usual
min/max quantitative semantics evaluated directly on trace samples (no
interpolation): positive means satisfied with margin, negative violated.

A compact text form is supported for config files:

    always[0,30] y0 <= 3.5
    eventually[2,10] (y0 >= 1 and not y1 <= 0.2)

with `not` > `and` > `or` precedence and parentheses as usual.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Atom:
    signal: int
    op: str  # "le" or "ge"
    bound: float


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Always:
    lo: float
    hi: float
    child: "Formula"


@dataclass(frozen=True)
class Eventually:
    lo: float
    hi: float
    child: "Formula"


Formula = Union[Atom, Not, And, Or, Always, Eventually]


# ---------- robustness ----------


def _window_samples(lo: float, hi: float, period: float) -> tuple[int, int]:
    if lo < 0 or hi < lo:
        raise ValueError(f"invalid window [{lo}, {hi}]")
    ia = int(math.ceil(lo / period - 1e-9))
    ib = int(math.floor(hi / period + 1e-9))
    if ib < ia:
        raise ValueError(f"window [{lo}, {hi}] contains no sample at period {period}")
    return ia, ib


def horizon_samples(formula: Formula, period: float) -> int:
    """Number of samples beyond the evaluation instant the formula needs."""
    if isinstance(formula, Atom):
        return 0
    if isinstance(formula, Not):
        return horizon_samples(formula.child, period)
    if isinstance(formula, (And, Or)):
        return max(horizon_samples(c, period) for c in formula.children)
    if isinstance(formula, (Always, Eventually)):
        _, ib = _window_samples(formula.lo, formula.hi, period)
        return ib + horizon_samples(formula.child, period)
    raise TypeError(f"not a formula node: {formula!r}")


def _rho(formula: Formula, trace: np.ndarray, period: float) -> np.ndarray:
    """Robustness signal: value at every sample where the horizon fits."""
    if isinstance(formula, Atom):
        if not 0 <= formula.signal < trace.shape[1]:
            raise ValueError(f"signal index {formula.signal} outside trace "
                             f"with {trace.shape[1]} signals")
        y = trace[:, formula.signal]
        return formula.bound - y if formula.op == "le" else y - formula.bound
    if isinstance(formula, Not):
        return -_rho(formula.child, trace, period)
    if isinstance(formula, (And, Or)):
        parts = [_rho(c, trace, period) for c in formula.children]
        n = min(p.size for p in parts)
        stacked = np.stack([p[:n] for p in parts])
        return (np.min if isinstance(formula, And) else np.max)(stacked, axis=0)
    if isinstance(formula, (Always, Eventually)):
        ia, ib = _window_samples(formula.lo, formula.hi, period)
        inner = _rho(formula.child, trace, period)
        if inner.size <= ib:
            raise ValueError("trace shorter than the formula horizon")
        windows = np.lib.stride_tricks.sliding_window_view(inner[ia:], ib - ia + 1)
        return (np.min if isinstance(formula, Always) else np.max)(windows, axis=1)
    raise TypeError(f"not a formula node: {formula!r}")


def robustness(formula: Formula, trace: np.ndarray, period: float) -> float:
    """Quantitative robustness of the trace at time zero.

    Args:
        formula: requirement tree.
        trace: (N,) single-signal or (N, s) multi-signal sample matrix.
        period: sample period (seconds per sample), > 0.

    Returns:
        Robustness value; sign matches Boolean satisfaction.

    Raises:
        ValueError: trace shorter than the formula's temporal horizon,
            empty windows, or out-of-range signal indices.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    arr = np.asarray(trace, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("trace must be a non-empty 1-D or 2-D array")
    if arr.shape[0] <= horizon_samples(formula, period):
        raise ValueError("trace shorter than the formula horizon")
    return float(_rho(formula, arr, period)[0])


# ---------- text form ----------

_TOKEN = re.compile(r"""\s*(?:
    (?P<name>always|eventually|and|or|not)\b
  | (?P<signal>y\d+)
  | (?P<op><=|>=)
  | (?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<punct>[()\[\],])
)""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"cannot tokenize requirement at: {text[pos:]!r}")
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind: str | None = None, value: str | None = None) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of requirement text")
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ValueError(f"unexpected token {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.or_expr()
        if self.peek() is not None:
            raise ValueError(f"trailing tokens after requirement: {self.peek()[1]!r}")
        return f

    def or_expr(self) -> Formula:
        parts = [self.and_expr()]
        while self.peek() == ("name", "or"):
            self.take()
            parts.append(self.and_expr())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def and_expr(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == ("name", "and"):
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of requirement text")
        if tok == ("name", "not"):
            self.take()
            return Not(self.unary())
        if tok[0] == "name" and tok[1] in ("always", "eventually"):
            self.take()
            self.take("punct", "[")
            lo = float(self.take("num")[1])
            self.take("punct", ",")
            hi = float(self.take("num")[1])
            self.take("punct", "]")
            child = self.unary()
            return Always(lo, hi, child) if tok[1] == "always" else Eventually(lo, hi, child)
        if tok == ("punct", "("):
            self.take()
            f = self.or_expr()
            self.take("punct", ")")
            return f
        if tok[0] == "signal":
            sig = int(self.take()[1][1:])
            op = "le" if self.take("op")[1] == "<=" else "ge"
            bound = float(self.take("num")[1])
            return Atom(sig, op, bound)
        raise ValueError(f"unexpected token {tok[1]!r}")


def parse_requirement(text: str) -> Formula:
    """Parse the compact text form into a formula tree."""
    return _Parser(_tokenize(text)).parse()


def _fmt_num(x: float) -> str:
    return repr(float(x))


def _wrap(f: Formula) -> str:
    s = format_requirement(f)
    return f"({s})" if isinstance(f, (And, Or)) else s


def format_requirement(f: Formula) -> str:
    """Inverse of parse_requirement (structural round trip)."""
    if isinstance(f, Atom):
        op = "<=" if f.op == "le" else ">="
        return f"y{f.signal} {op} {_fmt_num(f.bound)}"
    if isinstance(f, Not):
        return f"not {_wrap(f.child)}"
    if isinstance(f, Always):
        return f"always[{_fmt_num(f.lo)},{_fmt_num(f.hi)}] {_wrap(f.child)}"
    if isinstance(f, Eventually):
        return f"eventually[{_fmt_num(f.lo)},{_fmt_num(f.hi)}] {_wrap(f.child)}"
    if isinstance(f, And):
        return " and ".join(_wrap(c) for c in f.children)
    if isinstance(f, Or):
        return " or ".join(_wrap(c) if isinstance(c, (And, Or)) else format_requirement(c)
                           for c in f.children)
    raise TypeError(f"not a formula node: {f!r}")
