"""Low-level numerical helpers shared by the modules.

Integrands are assumed vectorized (they receive numpy arrays of nodes).
"""
from __future__ import annotations

import math
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import fixed_quad

from .errors import IntegrationFailure

_GL_ORDER = 20
_MAX_DEPTH = 40
_MAX_PANELS = 400
_STALL = 0.9


def integrate(f: Callable, x0: float, x1: float, rtol: float = 1e-13,
              atol: float = 1e-300) -> float:
    """Adaptive Gauss-Legendre quadrature of ``f`` over a finite interval.

    Each panel is compared against the sum of its two halves and split
    until they agree to ``rtol``. Oriented: ``integrate(f, b, a) == -integrate(f, a, b)``.
    """
    if x0 == x1:
        return 0.0
    if not (math.isfinite(x0) and math.isfinite(x1)):
        raise IntegrationFailure("integrate() needs finite limits")
    # wide positive ranges are split geometrically first
    if x0 > 0 and x1 > 0 and max(x0, x1) / min(x0, x1) > 4.0:
        edges = np.geomspace(x0, x1, int(math.ceil(abs(math.log2(x1 / x0)))) + 1)
        edges[0], edges[-1] = x0, x1
        return float(sum(_adaptive(f, a, b, rtol, atol)
                         for a, b in zip(edges[:-1], edges[1:])))
    return _adaptive(f, x0, x1, rtol, atol)


def _gl(f, a, b):
    with np.errstate(all="ignore"):
        val, _ = fixed_quad(f, a, b, n=_GL_ORDER)
    return float(val)


def _adaptive(f, a, b, rtol, atol):
    """Bisect panels until each agrees with its halves; at most ``_MAX_PANELS`` splits.

    A panel whose halves disagree about as much as the panel did with its
    parent is at the integrand's noise floor and is accepted as it stands.
    """
    whole = _gl(f, a, b)
    stack = [(a, b, whole, 0, math.inf)]
    total = 0.0
    splits = 0
    while stack:
        x0, x1, est, depth, parent_err = stack.pop()
        m = 0.5 * (x0 + x1)
        left = _gl(f, x0, m)
        right = _gl(f, m, x1)
        halves = left + right
        if not math.isfinite(halves):
            raise IntegrationFailure(f"non-finite integrand on [{x0}, {x1}]")
        err = abs(halves - est)
        if err <= max(rtol * abs(halves), atol) or depth >= _MAX_DEPTH \
                or m == x0 or m == x1 or splits >= _MAX_PANELS \
                or (depth >= 4 and err >= _STALL * parent_err):
            total += halves
            continue
        splits += 1
        stack.append((m, x1, right, depth + 1, err))
        stack.append((x0, m, left, depth + 1, err))
    return total


def improper_integral(f: Callable, start: float, end: float,
                      max_pieces: int = 2100) -> Tuple[float, bool]:
    """Integrate ``f`` from interior point ``start`` toward ``end``.

    ``end`` may be infinite or a point where ``f`` is singular. The range is cut
    into geometrically shrinking (finite end) or growing (infinite end) pieces.
    Returns ``(value, converged)``; divergence is declared when partial sums
    exceed 1e12 or consecutive pieces stop shrinking.
    """
    if start == end:
        return 0.0, True
    sign = 1.0 if end > start else -1.0
    span = max(1.0, abs(start))
    total = 0.0
    prev = None
    stalled = 0
    x0 = start
    piece = 0.0
    ratio = 1.0
    for k in range(1, max_pieces):
        if math.isinf(end):
            x1 = start + sign * span * (2.0 ** min(k, 1020) - 1.0)
            if k > 1020:
                break
        else:
            x1 = end - (end - start) * 2.0 ** (-k)
        if x1 == x0 or x1 == end:
            break
        try:
            piece = integrate(f, x0, x1)
        except IntegrationFailure:
            # the integrand broke down far out; fine if the pieces were already shrinking
            if prev is not None and (ratio < 0.999 or prev <= 1e-10 * max(1.0, abs(total))):
                break
            raise
        total += piece
        if not math.isfinite(total) or abs(total) > 1e12:
            return total, False
        a = abs(piece)
        if prev is not None and prev > 0:
            ratio = a / prev
            if ratio > 0.999 and a > 1e-12 * max(1.0, abs(total)):
                stalled += 1
                if stalled >= 8:
                    return total, False
            else:
                stalled = 0
        if a <= 1e-16 * max(1.0, abs(total)) and prev is not None and prev <= 1e-14 * max(1.0, abs(total)):
            return total, True
        prev = a
        x0 = x1
    # float resolution reached: account for the geometric tail
    if prev is None:
        return total, True
    if ratio < 0.999:
        tail = piece * ratio / (1.0 - ratio)
        if abs(tail) <= 1e-6 * max(1.0, abs(total)):
            return total + tail, True
        return total + tail, False
    return total, abs(piece) <= 1e-10 * max(1.0, abs(total))


def central_diff(f: Callable, x: float, step: float, order: int = 1) -> float:
    """First or second derivative by central differences with one Richardson level."""

    def d(s):
        if order == 1:
            return (f(x + s) - f(x - s)) / (2.0 * s)
        return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s)

    coarse = d(step)
    fine = d(0.5 * step)
    return float((4.0 * fine - coarse) / 3.0)


def stable_limit(f: Callable, points) -> float:
    """Estimate ``lim f`` along ``points``: snaps to 0 or inf when the sequence runs off."""
    vals = np.array([float(f(p)) for p in points])
    last = vals[-1]
    if abs(last) > 1e10 and abs(vals[-1]) > abs(vals[-2]):
        return math.inf if last > 0 else -math.inf
    if abs(last) < 1e-10 and abs(vals[-1]) <= abs(vals[-2]):
        return 0.0
    # Richardson-style extrapolation on the last three values
    a, b, c = vals[-3:]
    den = (c - b) - (b - a)
    if den != 0 and abs(c - b) < abs(b - a):
        return float(c - (c - b) ** 2 / den)
    return float(last)
