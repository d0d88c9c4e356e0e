"""Independent oracles used by the test suite.

Everything here recomputes target quantities by a route different from the
library code under test: determinant expansions instead of linear solves,
Gram-Schmidt instead of Hankel systems, tensor quadrature instead of
moment identities.
"""

import math

import numpy as np

from mopkit import linalg
from mopkit.ensemble import g_matrix
from mopkit.mop import as_multi_index, _hankel_from
from mopkit.quadrature import gauss_legendre
from mopkit.weights import weight_quad


def bordered_type2_coeffs(mt, nvec):
    """Expand the bordered-determinant formula for the type II polynomial.

    coeff_k = (-1)^(k+n) det(M_{n+1,n} with row k+1 removed) / D, straight
    from cofactor expansion along the appended monomial column.
    """
    nvec = as_multi_index(nvec)
    n = nvec.n
    wide = _hankel_from(mt.raw, nvec, n + 1)  # (n+1) x n
    square = _hankel_from(mt.raw, nvec, n)
    d = linalg.det(square)
    coeffs = np.empty(n + 1)
    for k in range(n + 1):
        minor = np.delete(wide, k, axis=0)
        coeffs[k] = (-1) ** (k + n) * linalg.det(minor) / d
    return coeffs


def gram_schmidt_monic(ws, n, tol=1e-13):
    """Monic orthogonal polynomials for a single weight by Gram-Schmidt.

    Returns a list of ascending-coefficient arrays p_0 .. p_n.
    """
    assert ws.p == 1
    w = ws.weights[0]

    def inner(c1, c2):
        def f(x):
            return (np.polynomial.polynomial.polyval(x, c1)
                    * np.polynomial.polynomial.polyval(x, c2))
        return weight_quad(f, w, tol=tol)

    polys = []
    for k in range(n + 1):
        c = np.zeros(k + 1)
        c[k] = 1.0
        for p in polys:
            proj = inner(c, p) / inner(p, p)
            c[: len(p)] -= proj * p
        polys.append(c)
    return polys


def tensor_cauchy_binet(ws, nvec, nodes=48):
    """(1/n!) tensor-quadrature of det[f_j(x_k)] det[g_j(x_k)] over supports.

    Every coordinate ranges over the union of supports (per-interval
    Gauss-Legendre nodes concatenated).
    """
    nvec = as_multi_index(nvec)
    n = nvec.n
    glx, glw = gauss_legendre(nodes)
    xs = []
    wq = []
    for lo, hi in ws.support_segments():
        h = 0.5 * (hi - lo)
        xs.append(0.5 * (lo + hi) + h * glx)
        wq.append(h * glw)
    xs = np.concatenate(xs)
    wq = np.concatenate(wq)
    m = xs.size

    grids = np.meshgrid(*([np.arange(m)] * n), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)  # (m^n, n)
    pts = xs[idx]
    weights_nd = np.prod(wq[idx], axis=1)

    # det f is a Vandermonde determinant
    detf = np.ones(pts.shape[0])
    for a in range(n):
        for b in range(a + 1, n):
            detf *= pts[:, b] - pts[:, a]
    # det g batched
    gm = g_matrix(ws, nvec, pts.ravel())
    G = gm.reshape(n, pts.shape[0], n).transpose(1, 0, 2)
    detg = np.linalg.det(G)

    total = float(np.sum(weights_nd * detf * detg))
    return total / math.factorial(n)


def cached(store, key, builder):
    """Session-store memoization so acceptance tests pay build costs inside
    their own timed bodies and later tests reuse the results."""
    if key not in store:
        store[key] = builder()
    return store[key]


def build_batch(ws, nvec, seed):
    from mopkit.sampling import SamplerConfig, sample_mcmc

    cfg = SamplerConfig(samples=100_000, chains=128, burn_in=10_000,
                        thinning=10, seed=seed)
    return sample_mcmc(ws, nvec, cfg)


def arcsine_problem(grid=2000):
    import mopkit as mk
    from mopkit.equilibrium import EquilibriumProblem

    return EquilibriumProblem.angelesco([mk.Interval(-1.0, 1.0)], [1.0], grid=grid)


def symmetric_angelesco_problem(grid=800):
    import mopkit as mk
    from mopkit.equilibrium import EquilibriumProblem

    return EquilibriumProblem.angelesco(
        [mk.Interval(-1.0, 0.0), mk.Interval(0.0, 1.0)], [0.5, 0.5], grid=grid)


def arcsine_cdf(x):
    return 0.5 + np.arcsin(np.clip(x, -1.0, 1.0)) / np.pi


def cell_boundary_cdf_error(measure, cdf_fn):
    """sup |discrete CDF - continuous CDF| evaluated at cell boundaries.

    Masses on midpoint grids represent cells; at a cell's right boundary the
    discrete CDF is exactly the accumulated mass, which is the natural point
    of comparison with a continuous CDF.
    """
    h = measure.spacing
    bounds = measure.grid + 0.5 * h
    discrete = np.cumsum(measure.masses)
    return float(np.abs(discrete - cdf_fn(bounds)).max())
