"""Safe parsing of slope expressions such as ``"mu^2"`` or ``"-exp(mu)*(1+exp(-mu))"``.

The grammar is infix arithmetic with ``^`` (or ``**``) for powers, the
functions ``exp``, ``log``, ``sqrt`` and ``abs``, the variable ``mu`` (``μ`` is
accepted too) and the constants ``pi``, ``e`` and numeric literals. Expressions
compile to numpy-vectorized callables.
"""
from __future__ import annotations

import ast
import math
from typing import Callable

import numpy as np

from .errors import ExpressionError

_FUNCS = {"exp": np.exp, "log": np.log, "sqrt": np.sqrt, "abs": np.abs}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}
_UNARY = {ast.USub: np.negative, ast.UAdd: np.positive}


def _compile(node):
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        val = float(node.value)
        return lambda mu: val
    if isinstance(node, ast.Name):
        if node.id in ("mu", "μ"):
            return lambda mu: mu
        if node.id in _CONSTS:
            val = _CONSTS[node.id]
            return lambda mu: val
        raise ExpressionError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left), _compile(node.right)
        return lambda mu: op(left(mu), right(mu))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op = _UNARY[type(node.op)]
        arg = _compile(node.operand)
        return lambda mu: op(arg(mu))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
        fn = _FUNCS[node.func.id]
        arg = _compile(node.args[0])
        return lambda mu: fn(arg(mu))
    raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def parse_slope_expression(text: str) -> Callable:
    """Compile ``text`` into ``f(mu)``; the result always has the shape of ``mu``."""
    src = str(text).replace("^", "**").replace("μ", "mu").strip()
    if not src:
        raise ExpressionError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    body = _compile(tree)

    def f(mu):
        mu = np.asarray(mu, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(body(mu), dtype=float) + np.zeros_like(mu)
        return out if out.ndim else float(out)

    f.__doc__ = text
    return f


def parse_endpoint(text: str) -> float:
    """Parse a rate-domain endpoint: a number, ``inf`` or ``-inf``."""
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity", "∞"):
        return math.inf
    if t in ("-inf", "-infinity", "-∞"):
        return -math.inf
    try:
        return float(t)
    except ValueError:
        raise ExpressionError(f"bad endpoint {text!r}") from None


__all__ = ["parse_slope_expression", "parse_endpoint"]
