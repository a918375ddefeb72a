"""Scalar special functions: principal-branch Lambert W and log-Gamma.

Both functions are pure and reentrant; they operate on ordinary floats.
"""

from __future__ import annotations

import math

__all__ = ["lambert_w0", "ln_gamma"]

_BRANCH_POINT = -math.exp(-1.0)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function, the inverse of w*exp(w).

    Uses Halley iteration.  For x in (0, 1) the initial guess is
    ``x*(1 - x)``, which lies inside the sandwich ``x - x**2 < W(x) < x``
    and converges in a handful of steps; outside that range a log-based
    guess is used.  Valid for ``x >= -1/e``.

    Raises
    ------
    ValueError
        If ``x < -1/e`` (below the branch point).
    """
    if math.isnan(x):
        raise ValueError("lambert_w0: argument is NaN")
    if x < _BRANCH_POINT:
        raise ValueError(f"lambert_w0: argument {x!r} below branch point -1/e")
    if x == 0.0:
        return 0.0
    if x == _BRANCH_POINT:
        return -1.0

    if 0.0 < x < 1.0:
        w = x * (1.0 - x)
    elif x < 0.0:
        # series around the branch point, accurate enough to seed Halley
        w = -1.0 + math.sqrt(2.0 * (math.e * x + 1.0))
    elif x <= math.e:
        w = math.log1p(x) * 0.7
    else:
        lx = math.log(x)
        w = lx - math.log(lx)

    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0.

    Thin domain-checked wrapper over :func:`math.lgamma` (Lanczos-class
    accuracy, relative error well below 1e-13 on the positive axis).
    Ratios Gamma(m+a)/Gamma(m+b) should be formed as
    ``exp(ln_gamma(m+a) - ln_gamma(m+b))`` to avoid overflow.

    Raises
    ------
    ValueError
        If ``x <= 0``.
    """
    if math.isnan(x) or x <= 0.0:
        raise ValueError(f"ln_gamma: argument {x!r} outside domain x > 0")
    return math.lgamma(x)
