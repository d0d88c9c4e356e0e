"""Vector logarithmic-energy equilibrium problems on fixed grids.

The continuous functional sum_jk c_jk I(mu_j, mu_k) + sum_j int V_j dmu_j is
discretized with masses on equispaced midpoint grids.  The diagonal of the
log kernel uses the half-cell distance floor h/2, the standard midpoint
correction that makes the discrete self-energy an O(h log h) quadrature of
the continuous one.  Minimization runs exponentiated-gradient (mirror
descent) steps on each mass simplex, which preserves nonnegativity and the
mass constraints exactly at every iterate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import SingularEnergyError, ValidationError
from .weights import Interval


@dataclass(frozen=True)
class DiscreteMeasure:
    """Nonnegative masses on a sorted grid."""

    grid: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if g.ndim != 1 or g.shape != m.shape:
            raise ValidationError("grid and masses must be 1-D of equal length")
        if np.any(np.diff(g) < 0):
            raise ValidationError("grid must be sorted")
        if np.any(m < 0):
            raise ValidationError("masses must be nonnegative")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "masses", m)

    @property
    def total_mass(self):
        return float(self.masses.sum())

    @property
    def spacing(self):
        """Mean grid spacing (grids are equispaced in practice)."""
        if self.grid.size < 2:
            return 1.0
        return float((self.grid[-1] - self.grid[0]) / (self.grid.size - 1))

    def cdf(self, x, side="right"):
        """Cumulative mass, right- or left-continuous."""
        idx = np.searchsorted(self.grid, np.asarray(x, dtype=float), side=side)
        csum = np.concatenate([[0.0], np.cumsum(self.masses)])
        return csum[idx]


def interaction_matrix(kind: str, p: int) -> np.ndarray:
    """Angelesco (full, +1/2 off-diagonal) or Nikishin (tridiagonal, -1/2)."""
    if p < 1:
        raise ValidationError("p must be at least 1")
    if kind == "angelesco":
        return 0.5 * (np.eye(p) + np.ones((p, p)))
    if kind == "nikishin":
        c = np.eye(p)
        idx = np.arange(p - 1)
        c[idx, idx + 1] = -0.5
        c[idx + 1, idx] = -0.5
        return c
    raise ValidationError(f"unknown interaction kind {kind!r}")


def _check_interaction(c):
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValidationError("interaction matrix must be square")
    if not np.allclose(c, c.T, atol=1e-12):
        raise ValidationError("interaction matrix must be symmetric")
    if np.linalg.eigvalsh(c).min() <= 0:
        raise ValidationError("interaction matrix must be positive definite")
    return c


def _log_kernel(x, y, floor=None):
    d = np.abs(x[:, None] - y[None, :])
    if floor is not None:
        d = np.maximum(d, floor)
    with np.errstate(divide="ignore"):
        return -np.log(d)


def log_energy(mu: DiscreteMeasure, nu: DiscreteMeasure | None = None,
               exclude_diagonal: bool = False) -> float:
    """Discrete logarithmic energy sum log(1/|x - y|) m_x m_y.

    With ``nu`` omitted this is the self-energy of ``mu``: diagonal pairs
    (and coincident off-diagonal nodes) are separated by the h/2 floor, or
    skipped entirely with ``exclude_diagonal`` (the reduced energy I* of a
    point configuration).  For two distinct measures, coincident nodes with
    positive masses raise :class:`SingularEnergyError`.
    """
    if nu is None or nu is mu:
        x, m = mu.grid, mu.masses
        if exclude_diagonal:
            k = _log_kernel(x, x)
            np.fill_diagonal(k, 0.0)
            charged = np.outer(m, m) > 0
            np.fill_diagonal(charged, False)
            if np.any(~np.isfinite(k) & charged):
                raise SingularEnergyError("coincident charged nodes in I*")
            k[~np.isfinite(k)] = 0.0
            return float(m @ k @ m)
        k = _log_kernel(x, x, floor=0.5 * mu.spacing)
        return float(m @ k @ m)
    k = _log_kernel(mu.grid, nu.grid)
    charged = np.outer(mu.masses, nu.masses) > 0
    if np.any(~np.isfinite(k) & charged):
        raise SingularEnergyError(
            "coincident charged nodes across two measures have infinite energy"
        )
    k[~np.isfinite(k)] = 0.0  # uncharged coincidences contribute nothing
    return float(mu.masses @ k @ nu.masses)


def energy_functional(measures, c, fields=None) -> float:
    """sum_jk c_jk I(mu_j, mu_k) + sum_j int V_j dmu_j.

    The double sum expands exactly as the Angelesco form
    sum_j I(mu_j) + sum_{j<k} I(mu_j, mu_k) and the Nikishin form
    sum_j I(mu_j) - sum_j I(mu_j, mu_{j+1}) for the respective matrices.
    """
    measures = list(measures)
    c = np.asarray(c, dtype=float)
    p = len(measures)
    if c.shape != (p, p):
        raise ValidationError(f"interaction matrix shape {c.shape} != ({p}, {p})")
    total = 0.0
    for j in range(p):
        for k in range(p):
            if c[j, k] == 0.0:
                continue
            if j == k:
                total += c[j, k] * log_energy(measures[j])
            else:
                total += c[j, k] * log_energy(measures[j], measures[k])
    if fields is not None:
        for v_j, mu in zip(fields, measures):
            if v_j is None:
                continue
            total += float(np.sum(_field_values(v_j, mu.grid) * mu.masses))
    return total


def _field_values(v, x):
    if callable(v):
        return np.asarray(v(x), dtype=float)
    coeffs = np.asarray(v, dtype=float)  # polynomial coefficients, ascending
    return np.polynomial.polynomial.polyval(x, coeffs)


@dataclass(frozen=True)
class EquilibriumProblem:
    """Supports, mass constraints, interaction matrix, and external fields."""

    intervals: tuple
    masses: tuple
    matrix: np.ndarray
    fields: tuple = None
    grid_sizes: tuple = None

    def __post_init__(self):
        p = len(self.intervals)
        if len(self.masses) != p:
            raise ValidationError("one mass constraint per interval required")
        if any(m <= 0 for m in self.masses):
            raise ValidationError("component masses must be positive")
        object.__setattr__(self, "matrix", _check_interaction(self.matrix))
        if self.fields is None:
            object.__setattr__(self, "fields", tuple([None] * p))
        if self.grid_sizes is None:
            object.__setattr__(self, "grid_sizes", tuple([500] * p))

    @property
    def p(self):
        return len(self.intervals)

    @staticmethod
    def angelesco(intervals, ray, grid=500, fields=None):
        """Masses r_j on disjoint intervals with the full interaction matrix."""
        ray = tuple(float(r) for r in ray)
        if abs(sum(ray) - 1.0) > 1e-9:
            raise ValidationError("ray limits must sum to 1")
        p = len(intervals)
        sizes = tuple([grid] * p) if np.isscalar(grid) else tuple(grid)
        return EquilibriumProblem(tuple(intervals), ray,
                                  interaction_matrix("angelesco", p),
                                  None if fields is None else tuple(fields), sizes)

    @staticmethod
    def nikishin(intervals, ray, grid=500, fields=None):
        """Masses sum_{i>=j} r_i on the interval chain, tridiagonal matrix."""
        ray = tuple(float(r) for r in ray)
        if abs(sum(ray) - 1.0) > 1e-9:
            raise ValidationError("ray limits must sum to 1")
        p = len(intervals)
        masses = tuple(float(sum(ray[j:])) for j in range(p))
        sizes = tuple([grid] * p) if np.isscalar(grid) else tuple(grid)
        return EquilibriumProblem(tuple(intervals), masses,
                                  interaction_matrix("nikishin", p),
                                  None if fields is None else tuple(fields), sizes)


@dataclass(frozen=True)
class EquilibriumReport:
    energy: float
    iterations: int
    kkt_residual: float
    converged: bool
    energy_history: tuple = ()


def _midpoint_grid(iv: Interval, m: int):
    h = iv.length / m
    return iv.a + h * (np.arange(m) + 0.5), h


def minimize_equilibrium(prob: EquilibriumProblem, *, max_iter=4000,
                         tol=1e-10) -> tuple:
    """Minimize the discretized functional over masses on fixed grids.

    Exponentiated-gradient steps with backtracking; the energy never
    increases across accepted iterations.  Returns (measures, report) where
    the report carries the discrete KKT residual: how far below the
    component's support level the effective potential dips anywhere.
    """
    p = prob.p
    c = prob.matrix
    grids = []
    spacings = []
    for iv, m in zip(prob.intervals, prob.grid_sizes):
        g, h = _midpoint_grid(iv, int(m))
        grids.append(g)
        spacings.append(h)
    kernels = {}
    for j in range(p):
        for k in range(p):
            if c[j, k] == 0.0:
                continue
            if j == k:
                kernels[j, k] = _log_kernel(grids[j], grids[j], floor=0.5 * spacings[j])
            elif (k, j) in kernels:
                kernels[j, k] = kernels[k, j].T
            else:
                kernels[j, k] = _log_kernel(grids[j], grids[k])
    fields = [
        _field_values(v, g) if v is not None else np.zeros_like(g)
        for v, g in zip(prob.fields, grids)
    ]
    masses = [np.full(g.size, mj / g.size) for g, mj in zip(grids, prob.masses)]

    def potentials(ms):
        """Per-component 2 sum_k c_jk K_jk m_k (the quadratic gradient part)."""
        out = []
        for j in range(p):
            acc = np.zeros(grids[j].size)
            for k in range(p):
                if c[j, k] != 0.0:
                    acc += 2.0 * c[j, k] * (kernels[j, k] @ ms[k])
            out.append(acc)
        return out

    def energy_of(ms, pots=None):
        pots = potentials(ms) if pots is None else pots
        quad = 0.5 * sum(float(ms[j] @ pots[j]) for j in range(p))
        lin = sum(float(ms[j] @ fields[j]) for j in range(p))
        return quad + lin, pots

    energy, pots = energy_of(masses)
    history = [energy]
    eta = 1.0
    iterations = 0
    converged = False
    for it in range(max_iter):
        iterations = it + 1
        grads = [pots[j] + fields[j] for j in range(p)]
        accepted = False
        for _ in range(40):
            trial = []
            for j in range(p):
                z = grads[j] - grads[j].min()
                expo = np.clip(eta * z, 0.0, 700.0)
                t = masses[j] * np.exp(-expo)
                s = t.sum()
                if s <= 0 or not np.isfinite(s):
                    trial = None
                    break
                trial.append(t * (prob.masses[j] / s))
            if trial is not None:
                e_new, pots_new = energy_of(trial)
                if e_new <= energy:
                    accepted = True
                    break
            eta *= 0.5
        if not accepted:
            converged = True  # no descent direction at this resolution
            break
        rel_drop = (energy - e_new) / max(abs(energy), 1e-300)
        masses, energy, pots = trial, e_new, pots_new
        history.append(energy)
        eta *= 1.25
        if rel_drop < tol:
            converged = True
            break

    kkt = 0.0
    for j in range(p):
        t = pots[j] + fields[j]
        charged = masses[j] > 1e-12 * prob.masses[j] / grids[j].size
        level = float(np.sum(t[charged] * masses[j][charged]) / masses[j][charged].sum())
        kkt = max(kkt, float(np.max(level - t)))
    measures = tuple(DiscreteMeasure(g, m) for g, m in zip(grids, masses))
    report = EquilibriumReport(energy, iterations, max(kkt, 0.0), converged,
                               tuple(history))
    return measures, report


def zero_counting_measure(roots, n: int, intervals, tol: float = 1e-8):
    """Per-interval atomic measures with mass 1/n at each root.

    Every root must lie in some interval (within ``tol`` of the endpoints);
    otherwise a :class:`ValidationError` names the stray root.
    """
    roots = np.sort(np.asarray(roots, dtype=float))
    buckets = [[] for _ in intervals]
    for r in roots:
        for j, iv in enumerate(intervals):
            if iv.contains(r, tol=tol):
                buckets[j].append(min(max(r, iv.a), iv.b))
                break
        else:
            raise ValidationError(f"root {r} lies outside every interval")
    out = []
    for pts in buckets:
        pts = np.asarray(pts)
        out.append(DiscreteMeasure(pts, np.full(pts.size, 1.0 / n)))
    return out


def kolmogorov_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """sup over the merged grid of |CDF_mu - CDF_nu| (both one-sided limits)."""
    if abs(mu.total_mass - nu.total_mass) > 1e-9:
        raise ValidationError(
            f"total masses differ: {mu.total_mass} vs {nu.total_mass}"
        )
    pts = np.union1d(mu.grid, nu.grid)
    right = np.abs(mu.cdf(pts, "right") - nu.cdf(pts, "right"))
    left = np.abs(mu.cdf(pts, "left") - nu.cdf(pts, "left"))
    return float(max(right.max(initial=0.0), left.max(initial=0.0)))
