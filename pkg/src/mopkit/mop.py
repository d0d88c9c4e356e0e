"""Multiple orthogonal polynomials from block Hankel moment systems.

Type II polynomials are computed by solving the transposed moment system,
type I tuples by solving the moment system itself; both are mathematically
identical to the determinantal formulas but far better conditioned.  All
solves run on hull-rescaled moments (the convex hull of the supports is
mapped to [-1, 1]) in 80-bit arithmetic.  For weights whose moments are
exact rationals, large multi-indices can instead be solved exactly, which
keeps zero locations meaningful well past the point where floating point
gives up on Hankel matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import NonNormalIndexError, NumericError, ValidationError
from .weights import MomentTable, WeightSystem, fixed_segment_nodes, weight_quad

MAX_TOTAL_DEGREE = 30
SINGULAR_PIVOT_RTOL = 1e-17
CONDITION_WARN = 1e12
EXACT_DEGREE_CUTOFF = 12  # beyond this, prefer exact solves when available


@dataclass(frozen=True)
class MultiIndex:
    """Multi-index (n_1, ..., n_p) with n = sum n_j and prefix sums N_j."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) < 1:
            raise ValidationError("multi-index needs at least one part")
        for v in self.parts:
            if int(v) != v or v < 0:
                raise ValidationError(f"multi-index parts must be nonnegative ints: {self.parts}")
        object.__setattr__(self, "parts", tuple(int(v) for v in self.parts))

    @property
    def n(self):
        return sum(self.parts)

    @property
    def p(self):
        return len(self.parts)

    def prefix(self, j):
        """N_j = n_1 + ... + n_j (N_0 = 0)."""
        return sum(self.parts[:j])

    def blocks(self):
        """Nonempty column blocks as (weight_index, start, stop), 0-based."""
        out = []
        start = 0
        for j, nj in enumerate(self.parts):
            if nj > 0:
                out.append((j, start, start + nj))
            start += nj
        return out

    def g_index(self, k):
        """Map the 1-based g-basis index k to (power, weight_index)."""
        if not 1 <= k <= self.n:
            raise ValidationError(f"basis index {k} out of range 1..{self.n}")
        start = 0
        for j, nj in enumerate(self.parts):
            if k <= start + nj:
                return k - start - 1, j
            start += nj
        raise AssertionError("unreachable")

    @staticmethod
    def from_ray(ray, n):
        """n_j = round(r_j * n) with largest-remainder correction."""
        r = np.asarray(ray, dtype=float)
        if np.any(r <= 0) or abs(r.sum() - 1.0) > 1e-9:
            raise ValidationError("ray limits must be positive and sum to 1")
        base = np.floor(r * n).astype(int)
        frac = r * n - base
        missing = int(n - base.sum())
        for idx in np.argsort(-frac, kind="stable")[:missing]:
            base[idx] += 1
        return MultiIndex(tuple(int(v) for v in base))


def as_multi_index(nvec):
    return nvec if isinstance(nvec, MultiIndex) else MultiIndex(tuple(nvec))


class Polynomial:
    """Real polynomial with ascending monomial coefficients.

    Evaluation runs in 80-bit Horner form, which matters for high-degree
    monic polynomials whose values on [-1, 1] are far below their
    coefficient scale.
    """

    def __init__(self, coeffs, condition_estimate=None, ill_conditioned=False,
                 method=None):
        hi = np.atleast_1d(np.asarray(coeffs)).astype(linalg.LD)
        # trim trailing zeros but keep the zero polynomial as [0.0]
        nz = np.nonzero(hi)[0]
        hi = hi[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=linalg.LD)
        self._hi = hi  # 80-bit copy: evaluation keeps the solver's accuracy
        self.coeffs = hi.astype(float)
        self.condition_estimate = condition_estimate
        self.ill_conditioned = ill_conditioned
        self.method = method

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        xs = np.asarray(x)
        if np.iscomplexobj(xs):
            acc = np.zeros_like(xs, dtype=complex)
            for c in self._hi[::-1]:
                acc = acc * xs + complex(c)
            return acc if xs.ndim else complex(acc)
        xl = xs.astype(linalg.LD)
        acc = np.zeros_like(xl)
        for c in self._hi[::-1]:
            acc = acc * xl + c
        out = acc.astype(float)
        return float(out) if xs.ndim == 0 else out

    def derivative(self):
        if self.degree == 0:
            return Polynomial([0.0])
        k = np.arange(1, len(self.coeffs))
        return Polynomial(self.coeffs[1:] * k)

    def __repr__(self):
        return f"Polynomial(degree={self.degree})"


@dataclass
class TypeISystem:
    """Type I tuple (A^(1), ..., A^(p)) and its linear form Q.

    For ill-conditioned systems solved in high precision, ``hp_coeffs``
    retains the full-precision coefficient blocks; ``q_values`` then
    evaluates the linear form through them, since the float polynomials
    alone cannot survive the cancellation between the A_j terms.
    """

    polys: tuple
    system: WeightSystem
    nvec: MultiIndex
    solve_residual: float
    condition_estimate: float
    ill_conditioned: bool
    hp_coeffs: tuple = None
    hp_dps: int = 0

    def q_values(self, x):
        """Linear form Q(x) = sum_j A_j(x) w_j(x)."""
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        if self.hp_coeffs is not None:
            from . import highprec

            total = np.asarray(
                highprec.linear_form_values(self.system, self.hp_coeffs, flat,
                                            self.hp_dps)
            )
        else:
            total = np.zeros_like(flat)
            for a_j, w_j in zip(self.polys, self.system.weights):
                if a_j.degree == 0 and a_j.coeffs[0] == 0.0:
                    continue
                total = total + a_j(flat) * w_j.values(flat)
        return float(total[0]) if x.ndim == 0 else total


@dataclass(frozen=True)
class HankelBlockMatrix:
    """Dense moment matrix with recorded block column structure."""

    matrix: np.ndarray
    nvec: MultiIndex
    col_blocks: tuple  # (weight_index, start, stop) per nonempty block

    @property
    def n(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DetReport:
    """Determinant value plus a 1-norm condition estimate."""

    det: float
    condition: float

    def __float__(self):
        return self.det


def _require_order(mt: MomentTable, order: int):
    if mt.k_max < order:
        raise ValidationError(
            f"moment table holds orders up to {mt.k_max}, need {order}"
        )


def _hankel_from(table_rows, nvec, n_rows):
    n = nvec.n
    m = np.zeros((n_rows, n))
    for j, start, stop in nvec.blocks():
        for l in range(stop - start):
            m[:, start + l] = table_rows[j][l : l + n_rows]
    return m


def block_hankel(mt: MomentTable, nvec) -> HankelBlockMatrix:
    """Assemble the n x n block Hankel moment matrix from raw moments."""
    nvec = as_multi_index(nvec)
    n = nvec.n
    if n < 1:
        raise ValidationError("multi-index must have |n| >= 1")
    if nvec.p != mt.p:
        raise ValidationError(f"multi-index has {nvec.p} parts, system has {mt.p}")
    _require_order(mt, n - 1 + max(nvec.parts) - 1)
    m = _hankel_from(mt.raw, nvec, n)
    return HankelBlockMatrix(m, nvec, tuple(nvec.blocks()))


def normality_determinant(M: HankelBlockMatrix) -> DetReport:
    """det of the moment matrix (LU, 80-bit) with a condition estimate."""
    a = M.matrix
    lu, _, parity = linalg.lu_factor(a)
    return DetReport(linalg.lu_det(lu, parity), linalg.cond1(a))


def _check_normal(mt, nvec):
    """Raise when the moment matrix is numerically singular.

    Normal Hankel systems have determinants that decay exponentially with n,
    so a test against the product of row norms would reject almost every
    moderate index.  Instead the hull-rescaled matrix (whose normality is
    equivalent: the rescaling is a triangular change of basis on both sides)
    is LU-factored, and any pivot at the extended-precision roundoff floor
    marks the index as non-normal; a bitwise-repeated column gives an exact
    zero pivot and is always caught.
    """
    n = nvec.n
    scaled = _hankel_from(mt.scaled, nvec, n)
    lu, _, _ = linalg.lu_factor(scaled)
    scale = float(np.abs(scaled).max())
    pivots = np.abs(np.diagonal(lu)).astype(float)
    if scale == 0.0 or pivots.min() <= SINGULAR_PIVOT_RTOL * scale:
        raise NonNormalIndexError(
            f"multi-index {nvec.parts} is not normal "
            f"(pivot {pivots.min():.3e} vs scale {scale:.3e})"
        )


def _affine_unscale(coeffs_t, c, s, power_scale):
    """Coefficients of power_scale * P((x - c)/s) from coefficients of P(t)."""
    acc = np.zeros(1, dtype=linalg.LD)
    cl, sl = linalg.LD(c), linalg.LD(s)
    for a_k in np.asarray(coeffs_t, dtype=linalg.LD)[::-1]:
        nxt = np.zeros(len(acc) + 1, dtype=linalg.LD)
        nxt[1:] += acc / sl
        nxt[:-1] -= acc * (cl / sl)
        nxt[0] += a_k
        acc = nxt
    n = len(acc) - 1
    while n > 0 and acc[n] == 0:
        n -= 1
    return acc[: n + 1] * linalg.LD(power_scale)


def _exact_available(mt: MomentTable, nvec: MultiIndex):
    return all(mt.exact[j] is not None for j, _, _ in nvec.blocks())


def _type2_exact(mt: MomentTable, nvec: MultiIndex):
    """Solve the type II system in exact rational arithmetic."""
    n = nvec.n
    rows = []
    rhs = []
    for j, _, _ in nvec.blocks():
        cj = mt.exact[j]
        for k in range(nvec.parts[j]):
            rows.append([cj[k + i] for i in range(n)])
            rhs.append(-cj[k + n])
    sol = linalg.solve_fractions(rows, rhs)
    return np.array([float(v) for v in sol] + [1.0])


def type2_mop(mt: MomentTable, nvec, method: str = "auto") -> Polynomial:
    """Monic type II multiple orthogonal polynomial of degree |n|.

    ``method`` is ``"float"`` (hull-rescaled 80-bit solve), ``"exact"``
    (rational arithmetic; requires exact moments), or ``"auto"`` which
    switches to exact for large degrees when available.
    """
    nvec = as_multi_index(nvec)
    n = nvec.n
    if n < 1:
        raise ValidationError("type II MOP needs |n| >= 1")
    if n > MAX_TOTAL_DEGREE:
        raise ValidationError(f"|n|={n} exceeds the supported cap {MAX_TOTAL_DEGREE}")
    _require_order(mt, n + max(nvec.parts) - 1)

    c, s = mt.center, mt.half_width
    system = np.zeros((n, n), dtype=linalg.LD)
    rhs = np.zeros(n, dtype=linalg.LD)
    r = 0
    for j, _, _ in nvec.blocks():
        for k in range(nvec.parts[j]):
            # condition row: sum_i a_i chat^{(j)}_{k+i} = -chat^{(j)}_{k+n}
            system[r, :] = mt.scaled[j][k : k + n].astype(linalg.LD)
            rhs[r] = linalg.LD(-mt.scaled[j][k + n])
            r += 1
    cond = linalg.cond1(system)
    ill = cond > CONDITION_WARN

    use_exact = method == "exact" or (method == "auto" and n > EXACT_DEGREE_CUTOFF
                                      and _exact_available(mt, nvec))
    if method == "exact" and not _exact_available(mt, nvec):
        raise ValidationError("exact moments unavailable for this weight system")
    if use_exact:
        try:
            coeffs = _type2_exact(mt, nvec)
        except NumericError as exc:
            raise NonNormalIndexError(
                f"multi-index {nvec.parts} is not normal (exact determinant is 0)"
            ) from exc
        return Polynomial(coeffs, condition_estimate=cond, ill_conditioned=ill,
                          method="exact")

    _check_normal(mt, nvec)
    a_t = linalg.solve(system, rhs)
    coeffs_t = np.concatenate([a_t, np.asarray([1.0], dtype=linalg.LD)])
    coeffs = _affine_unscale(coeffs_t, c, s, s ** n)
    coeffs[-1] = 1.0  # monic by construction; pin against rounding
    return Polynomial(coeffs, condition_estimate=cond, ill_conditioned=ill,
                      method="float")


def type1_mop(mt: MomentTable, nvec, method: str = "auto") -> TypeISystem:
    """Type I polynomials A^(j) (degree n_j - 1) normalized by the n-1 moment.

    Solves the n x n moment system whose first n-1 rows are the vanishing
    power conditions and whose last row is the normalization.  When the
    condition estimate passes ~1e9 (typical for Nikishin systems, whose
    weight blocks are nearly dependent) and the weights admit structural
    re-evaluation, ``"auto"`` re-solves in mpmath with a working precision
    matched to the conditioning; ``"mp"`` forces that path, ``"float"``
    forbids it.
    """
    nvec = as_multi_index(nvec)
    n = nvec.n
    if n < 1:
        raise ValidationError("type I MOP needs |n| >= 1")
    if n > MAX_TOTAL_DEGREE:
        raise ValidationError(f"|n|={n} exceeds the supported cap {MAX_TOTAL_DEGREE}")
    if method not in ("auto", "float", "mp"):
        raise ValidationError(f"unknown method {method!r}")
    _require_order(mt, 2 * n - 2)
    _check_normal(mt, nvec)

    c, s = mt.center, mt.half_width
    system = _hankel_from(mt.scaled, nvec, n).astype(linalg.LD)
    rhs = np.zeros(n, dtype=linalg.LD)
    rhs[n - 1] = 1.0
    cond = linalg.cond1(system)
    ill = cond > CONDITION_WARN

    from . import highprec

    want_hp = method == "mp" or (method == "auto" and cond > highprec.CONDITION_CUTOFF)
    if want_hp and highprec.supports_weight_system(mt.system):
        dps = 30 + max(0, int(np.ceil(np.log10(max(cond, 1.0)))))
        blocks = highprec.type1_coefficients(mt.system, nvec, dps)
        polys = tuple(
            Polynomial([float(v) for v in blk]) if blk else Polynomial([0.0])
            for blk in blocks
        )
        return TypeISystem(polys, mt.system, nvec, 0.0, cond, ill,
                           hp_coeffs=tuple(tuple(blk) for blk in blocks),
                           hp_dps=dps)
    if method == "mp":
        raise ValidationError("weights do not support high-precision re-evaluation")

    sol = linalg.solve(system, rhs)
    residual = float(np.max(np.abs(system @ sol - rhs)))

    polys = []
    start = 0
    scale = linalg.LD(s) ** (n - 1)
    for nj in nvec.parts:
        if nj == 0:
            polys.append(Polynomial([0.0]))
        else:
            coeffs_t = sol[start : start + nj]
            coeffs = _affine_unscale(coeffs_t, c, s, 1.0) / scale
            polys.append(Polynomial(coeffs))
            start += nj
    return TypeISystem(tuple(polys), mt.system, nvec, residual, cond, ill)


def poly_roots(P: Polynomial, dedupe_tol: float = 0.0) -> np.ndarray:
    """Real roots via companion-matrix eigenvalues, polished and sorted.

    Eigenvalues with relative imaginary part below 1e-8 are projected onto
    the real axis; clusters closer than ``dedupe_tol`` are merged to their
    mean.  A root whose polished residual stays large raises
    :class:`NumericError`.
    """
    if P.degree < 1:
        raise ValidationError("root finding needs degree >= 1")
    monic = P.coeffs / P.coeffs[-1]
    deg = len(monic) - 1
    comp = np.zeros((deg, deg))
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic[:-1]
    eig = np.linalg.eigvals(comp)
    keep = np.abs(eig.imag) <= 1e-8 * np.maximum(1.0, np.abs(eig))
    roots = np.sort(eig[keep].real)

    dp = P.derivative()
    for _ in range(3):  # Newton polish in extended precision
        fv = np.asarray(P(roots), dtype=float)
        dv = np.asarray(dp(roots), dtype=float)
        ok = np.abs(dv) > 0
        roots = np.where(ok, roots - np.where(ok, fv, 0.0) / np.where(ok, dv, 1.0), roots)
    roots = np.sort(roots)

    # residual screen against the polynomial's local coefficient scale
    absr = np.abs(roots)
    scale = np.zeros_like(roots)
    for i, c in enumerate(np.abs(P.coeffs)):
        scale += c * absr ** i
    resid = np.abs(np.asarray(P(roots), dtype=float))
    bad = resid > 1e-7 * np.maximum(scale, 1e-300)
    if np.any(bad):
        raise NumericError(
            f"root refinement failed: residual {resid[bad].max():.3e} at {roots[bad]}"
        )

    if dedupe_tol > 0.0 and roots.size:
        merged = [roots[0]]
        counts = [1]
        for r in roots[1:]:
            if r - merged[-1] <= dedupe_tol:
                merged[-1] = (merged[-1] * counts[-1] + r) / (counts[-1] + 1)
                counts[-1] += 1
            else:
                merged.append(r)
                counts.append(1)
        roots = np.asarray(merged)
    return roots


def orthogonality_residuals(P: Polynomial, ws: WeightSystem, nvec, tol=1e-12):
    """Residuals r_{j,k} = integral P(x) x^k w_j dx for k < n_j.

    Quadrature is independent of any moment table: the integrand is formed
    from the polynomial itself.  Returns one array per weight (empty when
    n_j = 0).
    """
    nvec = as_multi_index(nvec)
    out = []
    for j, w in enumerate(ws.weights):
        nj = nvec.parts[j]
        row = np.empty(nj)
        for k in range(nj):
            row[k] = weight_quad(lambda x, k=k: P(x) * x ** k, w, tol=tol)
        out.append(row)
    return out


def type1_condition_residuals(ts: TypeISystem, *, levels=10, order=32) -> np.ndarray:
    """Independent-quadrature check of integral x^k Q dx = delta_{k,n-1}.

    The linear form is integrated as a whole (never one A_j w_j term at a
    time, whose huge values cancel across j) on fixed graded panels over
    the union of supports.
    """
    n = ts.nvec.n
    ws = ts.system
    res = -np.eye(1, n, n - 1)[0]
    for lo, hi in ws.support_segments():
        xs, wq = fixed_segment_nodes(lo, hi, ws.segment_exponents(lo, hi),
                                     levels=levels, order=order)
        qv = ts.q_values(xs)
        res = res + np.asarray([np.sum(wq * xs ** k * qv) for k in range(n)])
    return res
