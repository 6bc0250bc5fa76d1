"""Scalar root finding and maximization used by the shock-polar solvers."""
from __future__ import annotations

import math

from .errors import NoRoot

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bracketed_root(f, a, b, fa=None, fb=None, xtol=1e-13, ftol=1e-12, maxiter=200):
    """Bisection safeguarded by secant steps on a sign-changing bracket.

    Returns the endpoint of the final bracket with the smaller residual.
    Raises NoRoot if the bracket does not change sign or the residual at
    convergence exceeds ``ftol``.
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoRoot(f"no sign change on [{a}, {b}]: f={fa}, {fb}")
    use_secant = True
    for _ in range(maxiter):
        if abs(b - a) < xtol:
            break
        x = None
        if use_secant and fb != fa:
            x = b - fb * (b - a) / (fb - fa)
            lo, hi = min(a, b), max(a, b)
            margin = 0.05 * (hi - lo)
            if not (lo + margin < x < hi - margin):
                x = None
        if x is None:
            x = 0.5 * (a + b)
        width = abs(b - a)
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        # alternate with plain bisection when the secant stalls one side
        use_secant = abs(b - a) < 0.5 * width or not use_secant
    x, fx = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    if abs(fx) > ftol:
        raise NoRoot(f"root residual {fx} above tolerance {ftol}")
    return x


def golden_max(f, a, b, xtol=1e-12, maxiter=200):
    """Maximize a unimodal ``f`` on [a, b]; returns (x, f(x))."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) < xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    best = max((fx, x), (fc, c), (fd, d))
    return best[1], best[0]
