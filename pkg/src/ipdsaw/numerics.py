"""Adaptive Gauss-Legendre quadrature, bracketed Newton root finding and log-space sums."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


class ConvergenceError(RuntimeError):
    pass


def _panel(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(_WEIGHTS, f(mid + half * _NODES)))


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              tol: float = 1e-13, *, rtol: float = 0.0, breakpoints=(),
              max_depth: int = 60) -> float:
    """Integrate a vectorized ``f`` over ``[a, b]``.

    15-point Gauss-Legendre panels, bisected until a panel and its two halves agree to
    within ``tol`` times the panel's share of ``b - a``, plus ``rtol`` times the panel
    value. ``breakpoints`` seed the initial panels, e.g. a geometric grading toward an
    endpoint where ``f`` is steep.
    """
    if b == a:
        return 0.0
    total_width = abs(b - a)
    edges = [a] + sorted(x for x in set(breakpoints) if a < x < b) + [b]
    accepted = []
    stack = [(lo, hi, _panel(f, lo, hi), 0) for lo, hi in zip(edges[:-1], edges[1:])][::-1]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        share = tol * abs(hi - lo) / total_width + rtol * abs(left + right)
        if abs(left + right - whole) <= share:
            accepted.append(left + right)
        elif depth >= max_depth:
            raise ConvergenceError(f"quadrature did not converge on [{lo}, {hi}]")
        else:
            # right pushed first so panels are accepted left to right
            stack.append((mid, hi, right, depth + 1))
            stack.append((lo, mid, left, depth + 1))
    return math.fsum(accepted)


def simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int) -> float:
    """Composite Simpson rule on ``n`` (even) subintervals."""
    if n % 2:
        n += 1
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def increasing_root(f: Callable[[float], float], df: Callable[[float], float], target: float,
                    lo: float, hi: float, *, bisect_width: float = 1e-3, tol: float = 1e-12,
                    max_iter: int = 200) -> float:
    """Solve ``f(x) = target`` for increasing ``f`` with ``f(lo) < target < f(hi)``.

    Bisection down to ``bisect_width``, then Newton kept inside the bracket. ``lo`` and
    ``hi`` may be open endpoints where ``f`` is not evaluated.
    """
    it = 0
    while hi - lo > bisect_width:
        it += 1
        if it > max_iter:
            raise ConvergenceError("bisection phase exceeded the iteration cap")
        mid = 0.5 * (lo + hi)
        r = f(mid) - target
        if r == 0.0:
            return mid
        if r < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    while it < max_iter:
        it += 1
        r = f(x) - target
        if abs(r) <= tol:
            return x
        if r < 0.0:
            lo = x
        else:
            hi = x
        step = r / df(x)
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if nxt == x or hi - lo <= 4.0 * math.ulp(x):
            return x
        x = nxt
    raise ConvergenceError(f"root not found within {max_iter} iterations (target {target!r})")


def logsumexp(values) -> float:
    """``log(sum(exp(values)))`` with ``-inf`` entries treated as zeros."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return -math.inf
    m = float(v.max())
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.exp(v - m).sum()))
