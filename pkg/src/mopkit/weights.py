"""Weight systems: Angelesco, Nikishin, and general families.

A weight is one of three families on a finite interval:

* ``constant`` -- the indicator of the interval,
* ``jacobi(alpha, beta)`` -- (b - x)^alpha (x - a)^beta with alpha, beta > -1,
* ``exp_poly(coeffs)`` -- exp(-sum_k c_k x^k).

Nikishin systems derive their higher weights as Markov (Stieltjes)
transforms of generator weights living on a chain of intervals with
alternating gaps; the transform sign is chosen from the interval order so
that every ratio w_j / w_1 is positive on the common support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import ConstructionError, DomainError, NumericError, ValidationError
from .quadrature import gauss_legendre, quad_with_substitution

FAMILIES = ("constant", "jacobi", "exp_poly")


@dataclass(frozen=True)
class Interval:
    """Finite closed interval [a, b] with a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ConstructionError("interval endpoints must be finite")
        if not self.a < self.b:
            raise ConstructionError(f"empty interval [{self.a}, {self.b}]")

    @property
    def length(self):
        return self.b - self.a

    @property
    def mid(self):
        return 0.5 * (self.a + self.b)

    def contains(self, x, tol=0.0):
        return self.a - tol <= x <= self.b + tol

    def gap_to(self, other):
        """Distance between the two intervals (0 when they overlap)."""
        return max(other.a - self.b, self.a - other.b, 0.0)

    def as_tuple(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class WeightSpec:
    """Parametrized weight family attached to an interval."""

    family: str
    interval: Interval
    alpha: float = 0.0
    beta: float = 0.0
    coeffs: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown weight family {self.family!r}")
        if self.family == "jacobi" and (self.alpha <= -1.0 or self.beta <= -1.0):
            raise ValidationError("jacobi exponents must exceed -1 for integrability")

    @staticmethod
    def constant(a, b):
        return WeightSpec("constant", Interval(a, b))

    @staticmethod
    def jacobi(a, b, alpha, beta):
        return WeightSpec("jacobi", Interval(a, b), alpha=alpha, beta=beta)

    @staticmethod
    def exp_poly(a, b, coeffs):
        return WeightSpec("exp_poly", Interval(a, b), coeffs=tuple(float(c) for c in coeffs))


class Weight:
    """Nonnegative weight on a finite interval, zero off its support.

    ``endpoint_exponents`` records the powers of (x - a) and (b - x) carried
    by the weight so quadrature can regularize integrable singularities.
    """

    def __init__(self, support, raw, raw_log, endpoint_exponents=(0.0, 0.0),
                 spec=None, exact_fn=None, label="weight", scale=1.0,
                 base=None, ratio=None):
        self.support = support
        self._raw = raw
        self._raw_log = raw_log
        self.endpoint_exponents = endpoint_exponents
        self.spec = spec
        self._exact_fn = exact_fn
        self.label = label
        # structure for exact / high-precision re-evaluation
        self.scale = scale
        self.base = base
        self.ratio = ratio

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_spec(spec: WeightSpec, scale: float = 1.0) -> "Weight":
        iv = spec.interval
        a, b = iv.a, iv.b
        if spec.family == "constant":
            raw = lambda x: np.full_like(np.asarray(x, dtype=float), scale)
            raw_log = lambda x: np.full_like(np.asarray(x, dtype=float), math.log(scale))
            exact = _constant_exact(a, b, scale)
            return Weight(iv, raw, raw_log, (0.0, 0.0), spec, exact, "constant",
                          scale=scale)
        if spec.family == "jacobi":
            al, be = spec.alpha, spec.beta

            def raw(x):
                with np.errstate(divide="ignore"):
                    return scale * np.power(b - x, al) * np.power(x - a, be)

            def raw_log(x):
                with np.errstate(divide="ignore"):
                    return math.log(scale) + al * np.log(b - x) + be * np.log(x - a)

            exact = _jacobi_exact(a, b, al, be, scale)
            return Weight(iv, raw, raw_log, (be, al), spec, exact,
                          f"jacobi({al},{be})", scale=scale)
        if spec.family == "exp_poly":
            cs = np.asarray(spec.coeffs, dtype=float)

            def raw_log(x):
                return math.log(scale) - np.polynomial.polynomial.polyval(x, cs)

            raw = lambda x: np.exp(raw_log(x))
            return Weight(iv, raw, raw_log, (0.0, 0.0), spec, None, "exp_poly",
                          scale=scale)
        raise ValidationError(f"unknown family {spec.family!r}")

    @staticmethod
    def product(base: "Weight", ratio) -> "Weight":
        """Weight of the form base(x) * ratio(x) with ratio > 0 on the support."""

        def raw(x):
            return base._raw(x) * ratio(x)

        def raw_log(x):
            return base._raw_log(x) + np.log(ratio(x))

        return Weight(base.support, raw, raw_log, base.endpoint_exponents,
                      base.spec, None, base.label + "*markov",
                      scale=base.scale, base=base, ratio=ratio)

    def scaled(self, c: float) -> "Weight":
        if c <= 0:
            raise ValidationError("scale factor must be positive")
        if self.ratio is not None:
            return Weight.product(self.base.scaled(c), self.ratio)
        raw = lambda x: c * self._raw(x)
        raw_log = lambda x: math.log(c) + self._raw_log(x)
        exact = None
        if self._exact_fn is not None:
            base_fn = self._exact_fn
            exact = lambda k: base_fn(k) * Fraction(c)
        return Weight(self.support, raw, raw_log, self.endpoint_exponents,
                      self.spec, exact, self.label + "*scaled", scale=self.scale * c)

    # -- evaluation --------------------------------------------------------

    def values(self, x):
        """Weight values; zero outside the support."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.zeros_like(xv)
        m = (xv >= self.support.a) & (xv <= self.support.b)
        if m.any():
            out[m] = self._raw(xv[m])
        return float(out[0]) if scalar else out

    def log_values(self, x):
        """log of the weight; -inf outside the support."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.full_like(xv, -np.inf)
        m = (xv >= self.support.a) & (xv <= self.support.b)
        if m.any():
            out[m] = self._raw_log(xv[m])
        return float(out[0]) if scalar else out

    def exact_moment(self, k: int):
        """Exact rational moment integral x^k w(x) dx, or None."""
        if self._exact_fn is None:
            return None
        return self._exact_fn(k)

    def __repr__(self):
        return f"Weight({self.label} on [{self.support.a}, {self.support.b}])"


def _constant_exact(a, b, scale):
    fa, fb, fs = Fraction(a), Fraction(b), Fraction(scale)

    def exact(k):
        return fs * (fb ** (k + 1) - fa ** (k + 1)) / (k + 1)

    return exact


def _jacobi_exact(a, b, alpha, beta, scale):
    # Exact path only for small nonnegative integer exponents; the weight is
    # then a polynomial with rational coefficients.
    if not (float(alpha).is_integer() and float(beta).is_integer()):
        return None
    ia, ib = int(alpha), int(beta)
    if ia < 0 or ib < 0 or ia + ib > 40:
        return None
    fa, fb, fs = Fraction(a), Fraction(b), Fraction(scale)
    # (b - x)^ia (x - a)^ib expanded in powers of x
    coeffs = _poly_pow({0: fb, 1: Fraction(-1)}, ia)
    coeffs = _poly_mul(coeffs, _poly_pow({0: -fa, 1: Fraction(1)}, ib))

    def exact(k):
        total = Fraction(0)
        for d, c in coeffs.items():
            m = k + d
            total += c * (fb ** (m + 1) - fa ** (m + 1)) / (m + 1)
        return fs * total

    return exact


def _poly_mul(p, q):
    out = {}
    for dp, cp in p.items():
        for dq, cq in q.items():
            out[dp + dq] = out.get(dp + dq, Fraction(0)) + cp * cq
    return out


def _poly_pow(p, n):
    out = {0: Fraction(1)}
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


# ---------------------------------------------------------------------------
# Stieltjes / Markov transforms
# ---------------------------------------------------------------------------

def _sign_value(sign):
    if sign in ("plus", 1, +1.0):
        return 1.0
    if sign in ("minus", -1, -1.0):
        return -1.0
    raise ValidationError(f"sign must be 'plus' or 'minus', got {sign!r}")


def stieltjes_transform(v: Weight, x: float, sign="plus", *, tol=1e-12) -> float:
    """Evaluate +/- integral of v(y) / (x - y) dy for x off the support of v.

    Principal-value evaluation on the support is not provided: x inside or
    on the boundary raises :class:`DomainError`.
    """
    a, b = v.support.a, v.support.b
    if a <= x <= b:
        raise DomainError(f"x={x} lies inside or on the boundary of supp(v)=[{a}, {b}]")
    s = _sign_value(sign)

    def f(y):
        return v.values(y) / (x - y)

    return s * quad_with_substitution(f, a, b, v.endpoint_exponents, tol=tol)


def _nonsmooth(e):
    """Fixed-panel rules need the substitution for any non-integer power:
    negative powers are singular, fractional positive ones are kinks."""
    return e < 0.0 or float(e) != int(e)


def _substitution_pieces(lo, hi, ea, eb):
    """Split [lo, hi] into pieces with at most one regularized endpoint."""
    if _nonsmooth(ea) and _nonsmooth(eb):
        mid = 0.5 * (lo + hi)
        return [(lo, mid, "left", ea), (mid, hi, "right", eb)]
    if _nonsmooth(ea):
        return [(lo, hi, "left", ea)]
    if _nonsmooth(eb):
        return [(lo, hi, "right", eb)]
    return [(lo, hi, None, 0.0)]


def _piece_maps(lo, hi, side, exponent):
    """(x_of_u, jac_of_u) on [0, 1] after iterated sqrt substitutions."""
    if side is None:
        return (lambda u: lo + (hi - lo) * u, lambda u: np.full_like(u, hi - lo))
    width = hi - lo
    if side == "left":
        x_of = lambda t: lo + width * t * t
    else:
        x_of = lambda t: hi - width * t * t
    jac_of = lambda t: 2.0 * width * t
    e = 2.0 * exponent + 1.0
    while e < 0.0:
        ix, ij = x_of, jac_of
        x_of = lambda u, ix=ix: ix(u * u)
        jac_of = lambda u, ij=ij: ij(u * u) * 2.0 * u
        e = 2.0 * e + 1.0
    return x_of, jac_of


def _dyadic_breakpoints(levels, toward_one):
    """Panel breakpoints on [0, 1] refined dyadically toward one end."""
    pts = [0.0] + [1.0 - 0.5 ** k for k in range(1, levels + 1)] + [1.0]
    pts = np.unique(np.asarray(pts))
    if not toward_one:
        pts = np.sort(1.0 - pts)
    return pts


def fixed_segment_nodes(lo, hi, exponents=(0.0, 0.0), *, levels=10, order=32):
    """Fixed quadrature nodes and weights on [lo, hi] for analytic integrands.

    Endpoint power singularities are removed by the square-root
    substitution; panels are graded dyadically toward both ends.  Useful
    when many integrals share one smooth integrand family and adaptivity
    would just repeat work.  Returns (nodes, weights) with the substitution
    jacobians folded into the weights.
    """
    ea, eb = exponents
    pieces = _substitution_pieces(lo, hi, ea, eb)
    glx, glw = gauss_legendre(order)
    xs = []
    ws = []
    for plo, phi, side, exponent in pieces:
        x_of, jac_of = _piece_maps(plo, phi, side, exponent)
        bps = np.unique(np.concatenate([_dyadic_breakpoints(levels, True),
                                        _dyadic_breakpoints(levels, False)]))
        for u0, u1 in zip(bps[:-1], bps[1:]):
            h = 0.5 * (u1 - u0)
            u = 0.5 * (u0 + u1) + h * glx
            xs.append(x_of(u))
            ws.append(h * glw * jac_of(u))
    return np.concatenate(xs), np.concatenate(ws)


class MarkovRatio:
    """Markov transform x -> sgn * integral v(y)/(x - y) dy on fixed panels.

    The panel/node layout is chosen once so that evaluation anywhere on the
    (separated) target interval is a single dot product, accurate to
    ~1e-13 relative.  Construction cross-checks the result against direct
    adaptive quadrature at three probe points.
    """

    ORDER = 24

    def __init__(self, v: Weight, eval_interval: Interval, sign: int, *, inner_tol=1e-13):
        self.v = v
        self.eval_interval = eval_interval
        self.sign = float(sign)
        sup = v.support
        gap = sup.gap_to(eval_interval)
        if gap <= 0.0:
            raise ConstructionError(
                "generator support and evaluation interval must be separated"
            )
        eval_right = eval_interval.a >= sup.b  # target sits to the right of supp(v)
        nodes = []
        coeffs = []
        glx, glw = gauss_legendre(self.ORDER)
        ea, eb = v.endpoint_exponents
        for lo, hi, side, exponent in _substitution_pieces(sup.a, sup.b, ea, eb):
            piece_gap = gap + (sup.b - hi if eval_right else lo - sup.a)
            levels = int(np.clip(np.ceil(np.log2(max((hi - lo) / piece_gap, 1.0))), 0, 48)) + 10
            x_of, jac_of = _piece_maps(lo, hi, side, exponent)
            # the pole side maps to u=1 iff the near x-endpoint is the image of u=1
            if side is None:
                toward_one = eval_right
            elif side == "left":
                toward_one = eval_right  # u=1 -> x=hi
            else:
                toward_one = not eval_right  # u=1 -> x=lo
            bps = _dyadic_breakpoints(levels, toward_one)
            for u0, u1 in zip(bps[:-1], bps[1:]):
                h = 0.5 * (u1 - u0)
                u = 0.5 * (u0 + u1) + h * glx
                x = x_of(u)
                nodes.append(x)
                coeffs.append(h * glw * jac_of(u) * v.values(x) * self.sign)
        self.nodes = np.concatenate(nodes)
        self.coeffs = np.concatenate(coeffs)
        self._verify(inner_tol)

    def _verify(self, inner_tol):
        iv = self.eval_interval
        for x in (iv.a, iv.mid, iv.b):
            direct = stieltjes_transform(self.v, x, "plus", tol=inner_tol) * self.sign
            got = self(np.asarray([x]))[0]
            if abs(got - direct) > max(1e-11, 1e-11 * abs(direct)):
                raise NumericError(
                    f"Markov transform panels inaccurate at x={x}: {got} vs {direct}"
                )
            if got <= 0.0:
                raise NumericError(
                    "Markov ratio is not positive on the target interval; "
                    "interval ordering is inconsistent with the sign rule"
                )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        out = np.empty_like(flat)
        step = 4096
        for i in range(0, flat.size, step):
            chunk = flat[i : i + step]
            out[i : i + step] = (self.coeffs / (chunk[:, None] - self.nodes)).sum(axis=1)
        return out.reshape(np.atleast_1d(x).shape) if x.ndim else float(out[0])


# ---------------------------------------------------------------------------
# Weight systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSystem:
    """p weights with supports, a kind tag, and (for Nikishin) generators."""

    kind: str
    weights: tuple
    intervals: tuple
    generators: tuple = ()

    def __post_init__(self):
        if self.kind not in ("general", "angelesco", "nikishin"):
            raise ValidationError(f"unknown system kind {self.kind!r}")
        if len(self.weights) < 1:
            raise ValidationError("a weight system needs at least one weight")
        if self.kind == "angelesco":
            ivs = self.intervals
            for left, right in zip(ivs[:-1], ivs[1:]):
                if left.b > right.a:
                    raise ConstructionError(
                        f"Angelesco intervals overlap: [{left.a}, {left.b}] and "
                        f"[{right.a}, {right.b}]"
                    )
        if self.kind == "nikishin":
            ivs = self.intervals
            for left, right in zip(ivs[:-1], ivs[1:]):
                if left.gap_to(right) <= 0.0:
                    raise ConstructionError(
                        "consecutive Nikishin intervals must be disjoint"
                    )

    @property
    def p(self):
        return len(self.weights)

    @staticmethod
    def general(weights):
        ws = tuple(weights)
        return WeightSystem("general", ws, tuple(w.support for w in ws))

    def supports(self):
        return tuple(w.support for w in self.weights)

    def support_segments(self):
        """The union of supports, split at every weight endpoint."""
        pts = sorted({w.support.a for w in self.weights} | {w.support.b for w in self.weights})
        segs = []
        for lo, hi in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (lo + hi)
            if any(w.support.contains(mid) for w in self.weights):
                segs.append((lo, hi))
        return segs

    def segment_exponents(self, lo, hi):
        """Weight endpoint exponents that apply on the segment [lo, hi]."""
        ea = min((w.endpoint_exponents[0] for w in self.weights if w.support.a == lo),
                 default=0.0)
        eb = min((w.endpoint_exponents[1] for w in self.weights if w.support.b == hi),
                 default=0.0)
        return ea, eb

    def support_hull(self):
        segs = self.support_segments()
        return Interval(segs[0][0], segs[-1][1])


def build_angelesco(specs) -> WeightSystem:
    """Weight system on pairwise (interior-)disjoint intervals.

    The intervals are relabeled in increasing order; interiors must be
    disjoint (touching endpoints are allowed).
    """
    specs = sorted(specs, key=lambda s: s.interval.a)
    if not specs:
        raise ValidationError("need at least one weight")
    for left, right in zip(specs[:-1], specs[1:]):
        if left.interval.b > right.interval.a:
            raise ConstructionError(
                f"supports overlap: [{left.interval.a}, {left.interval.b}] and "
                f"[{right.interval.a}, {right.interval.b}]"
            )
    weights = tuple(Weight.from_spec(s) for s in specs)
    return WeightSystem("angelesco", weights, tuple(s.interval for s in specs))


def build_nikishin(w1_spec: WeightSpec, generator_specs) -> WeightSystem:
    """Nikishin system from a base weight and a chain of generators.

    ``generator_specs`` live on the intervals Gamma_2, ..., Gamma_p; for
    p >= 3 they are themselves combined into a Nikishin system on Gamma_2
    and lifted.  The transform sign comes from the interval order, so all
    ratios w_j / w_1 are positive on Gamma_1.
    """
    gens = list(generator_specs)
    if not gens:
        raise ValidationError("a Nikishin system needs at least one generator")
    g1 = w1_spec.interval
    g2 = gens[0].interval
    if g1.gap_to(g2) <= 0.0:
        raise ConstructionError("Gamma_1 and Gamma_2 must be disjoint")
    w1 = Weight.from_spec(w1_spec)
    if len(gens) == 1:
        v_weights = (Weight.from_spec(gens[0]),)
    else:
        v_weights = build_nikishin(gens[0], gens[1:]).weights
    sign = 1 if g2.b <= g1.a else -1  # plus when Gamma_2 lies to the left
    weights = [w1]
    for v in v_weights:
        weights.append(Weight.product(w1, MarkovRatio(v, g1, sign)))
    intervals = (g1,) + tuple(s.interval for s in gens)
    return WeightSystem("nikishin", tuple(weights), intervals, generators=v_weights)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def weight_quad(fn, w: Weight, *, tol=1e-12):
    """Integrate fn(x) * w(x) over the support of w (fn=None means fn=1)."""
    if fn is None:
        f = w.values
    else:
        f = lambda x: fn(x) * w.values(x)
    return quad_with_substitution(f, w.support.a, w.support.b,
                                  w.endpoint_exponents, tol=tol)


@dataclass(frozen=True)
class MomentTable:
    """Monomial moments of every weight, raw and hull-rescaled.

    ``raw[j, k]`` is integral x^k w_j dx; ``scaled[j, k]`` is the same with
    x replaced by (x - c)/s, where [c - s, c + s] is the convex hull of the
    supports.  The rescaled entries are computed by direct quadrature (never
    by binomial transform, which cancels catastrophically).  ``exact`` holds
    per-weight tuples of Fractions when the family admits exact moments.
    """

    system: WeightSystem
    raw: np.ndarray
    scaled: np.ndarray
    hull: Interval
    tol: float
    exact: tuple

    @property
    def k_max(self):
        return self.raw.shape[1] - 1

    @property
    def p(self):
        return self.raw.shape[0]

    @property
    def center(self):
        return self.hull.mid

    @property
    def half_width(self):
        return 0.5 * self.hull.length


def moments(ws: WeightSystem, j: int, k_max: int, tol: float = 1e-12) -> np.ndarray:
    """Raw moments c_k = integral x^k w_j dx for k = 0..k_max (j is 1-based)."""
    if not 1 <= j <= ws.p:
        raise ValidationError(f"weight index {j} out of range 1..{ws.p}")
    w = ws.weights[j - 1]
    row = np.empty(k_max + 1)
    for k in range(k_max + 1):
        row[k] = weight_quad((lambda x, k=k: x ** k), w, tol=tol)
    return row


def moment_table(ws: WeightSystem, k_max: int, tol: float = 1e-12) -> MomentTable:
    """Raw and hull-rescaled moments of all weights up to order k_max."""
    hull = ws.support_hull()
    c, s = hull.mid, 0.5 * hull.length
    raw = np.empty((ws.p, k_max + 1))
    scaled = np.empty((ws.p, k_max + 1))
    exact = []
    for i, w in enumerate(ws.weights):
        for k in range(k_max + 1):
            raw[i, k] = weight_quad((lambda x, k=k: x ** k), w, tol=tol)
            scaled[i, k] = weight_quad(
                (lambda x, k=k: ((x - c) / s) ** k), w, tol=tol
            )
        if w.exact_moment(0) is not None:
            exact.append(tuple(w.exact_moment(k) for k in range(k_max + 1)))
        else:
            exact.append(None)
    return MomentTable(ws, raw, scaled, hull, tol, tuple(exact))
