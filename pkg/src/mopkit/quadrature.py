"""Adaptive composite Gauss-Legendre quadrature.

Each panel is estimated with a 12-point and a 24-point rule; a panel is
accepted when the two agree within its share of the global tolerance and is
bisected otherwise.  Integrable endpoint singularities of the form
(x - a)^beta with beta in (-1, 0) are handled by the substitution
x = a + (b - a) t**2, which turns the factor into t^(2 beta + 1) before the
adaptive rule sees it.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .exceptions import QuadratureError

_LO = 12
_HI = 24
_EPS = float(np.finfo(np.float64).eps)


@lru_cache(maxsize=None)
def gauss_legendre(m: int):
    """Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1]."""
    return np.polynomial.legendre.leggauss(m)


def panel_nodes(a: float, b: float, m: int):
    """Gauss-Legendre nodes and weights mapped to the panel [a, b]."""
    x, w = gauss_legendre(m)
    h = 0.5 * (b - a)
    return 0.5 * (a + b) + h * x, h * w


def adaptive_quad(f, a, b, *, tol=1e-12, max_panels=20000, max_depth=52):
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    ``f`` must accept a 1-D array of points and return values of the same
    shape (real or complex).  A relative accuracy floor of a few ulps applies
    for integrands whose magnitude makes the absolute target unattainable.
    Raises :class:`QuadratureError` when the panel budget is exhausted before
    the tolerance is met; the exception carries the best estimate.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise QuadratureError("integration endpoints must be finite")
    if a == b:
        return 0.0
    total_width = b - a
    stack = [(a, b, 0)]
    value = 0.0
    err_acc = 0.0
    panels = 0
    while stack:
        pa, pb, depth = stack.pop()
        xs_lo, ws_lo = panel_nodes(pa, pb, _LO)
        xs_hi, ws_hi = panel_nodes(pa, pb, _HI)
        lo = np.sum(ws_lo * f(xs_lo))
        hi = np.sum(ws_hi * f(xs_hi))
        err = abs(hi - lo)
        budget = tol * abs(pb - pa) / abs(total_width)
        if err <= max(budget, 32.0 * _EPS * abs(hi)) or depth >= max_depth:
            value = value + hi
            err_acc += err
            panels += 1
            if panels > max_panels:
                raise QuadratureError(
                    "panel budget exhausted", estimate=value, error_estimate=err_acc
                )
        else:
            mid = 0.5 * (pa + pb)
            stack.append((pa, mid, depth + 1))
            stack.append((mid, pb, depth + 1))
    if err_acc > max(4.0 * tol, 1e-13 * abs(value)):
        raise QuadratureError(
            f"quadrature stalled at error estimate {err_acc:.3e}",
            estimate=value,
            error_estimate=err_acc,
        )
    return value


def substituted_integrand(f, a, b, side):
    """Rewrite ``f`` on [a, b] as a function on [0, 1] via x = a + (b-a) t^2.

    ``side`` selects which endpoint the substitution clusters toward:
    ``"left"`` regularizes a singularity at ``a``, ``"right"`` one at ``b``.
    """
    width = b - a

    if side == "left":

        def g(t):
            return f(a + width * t * t) * (2.0 * width * t)

    else:

        def g(t):
            return f(b - width * t * t) * (2.0 * width * t)

    return g


def _regularized(f, a, b, side, exponent):
    """Iterate the substitution until the carried power is nonnegative.

    One substitution turns a power e at the endpoint into 2e + 1 at u = 0,
    so any integrable power (e > -1) becomes regular in finitely many steps.
    """
    g = substituted_integrand(f, a, b, side)
    e = 2.0 * exponent + 1.0
    while e < 0.0:
        g = substituted_integrand(g, 0.0, 1.0, "left")
        e = 2.0 * e + 1.0
    return g


def quad_with_substitution(f, a, b, exponents=(0.0, 0.0), *, tol=1e-12):
    """Integrate ``f`` over [a, b], substituting at singular endpoints.

    ``exponents`` are the powers of (x - a) and (b - x) carried by the
    integrand; a negative power triggers the square-root substitution on
    that side (split at the midpoint when both ends are singular),
    iterated until the transformed integrand is regular.
    """
    ea, eb = exponents
    if ea < 0.0 and eb < 0.0:
        mid = 0.5 * (a + b)
        left = adaptive_quad(_regularized(f, a, mid, "left", ea), 0.0, 1.0, tol=0.5 * tol)
        right = adaptive_quad(_regularized(f, mid, b, "right", eb), 0.0, 1.0, tol=0.5 * tol)
        return left + right
    if ea < 0.0:
        return adaptive_quad(_regularized(f, a, b, "left", ea), 0.0, 1.0, tol=tol)
    if eb < 0.0:
        return adaptive_quad(_regularized(f, a, b, "right", eb), 0.0, 1.0, tol=tol)
    return adaptive_quad(f, a, b, tol=tol)


def quad_segments(f, segments, *, tol=1e-12):
    """Integrate ``f`` over a list of disjoint (a, b) segments."""
    segs = list(segments)
    if not segs:
        return 0.0
    per = tol / len(segs)
    return sum(adaptive_quad(f, a, b, tol=per) for a, b in segs)
