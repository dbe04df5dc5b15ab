"""Classical baseline: interpolation from J = C(n+d, d) evaluations.

Over F_q the Vandermonde system is solved by exact Gauss-Jordan elimination
on encodings; over R by LU with partial pivoting and a residual check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import monomial
from .errors import DimensionMismatch, Exhausted, SingularSystem

MAX_ATTEMPTS = 1000
REAL_RESIDUAL_RTOL = 1e-8


@dataclass
class SampleSet:
    points: list
    values: list

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise DimensionMismatch("points and values differ in length")
        if len({tuple(np.ravel(p).tolist()) for p in self.points}) != len(self.points):
            raise DimensionMismatch("points must be pairwise distinct")

    def __len__(self):
        return len(self.points)


def vandermonde_matrix(points, n, d, field=None):
    """Row i is the Veronese vector of ``points[i]``."""
    pts = np.asarray(points).reshape(-1, n)
    return monomial.eval_veronese(pts, n, d, field)


def row_reduce(M, field):
    """Reduced row echelon form over F_q; returns (matrix, pivot columns)."""
    M = np.array(M, dtype=np.int64)
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = field.mul(M[r], field.inv(M[r, c])).astype(np.int64)
        others = np.flatnonzero(M[:, c])
        others = others[others != r]
        if others.size:
            scaled = field.mul(M[others, c][:, None], M[r][None, :])
            M[others] = field.sub(M[others], scaled).astype(np.int64)
        pivots.append(c)
        r += 1
    return M, pivots


def rank_ff(M, field):
    return len(row_reduce(M, field)[1])


def _solve_ff(V, values, field):
    J = V.shape[1]
    aug = np.concatenate([V, np.asarray(values, dtype=np.int64)[:, None]], axis=1)
    R, pivots = row_reduce(aug, field)
    if J in pivots:
        raise SingularSystem("samples are inconsistent with a degree-d polynomial")
    if len(pivots) < J:
        raise SingularSystem(f"Vandermonde rank {len(pivots)} < J = {J}")
    return R[:J, J].copy()


def _solve_real(V, values):
    J = V.shape[1]
    values = np.asarray(values)
    if V.shape[0] < J or np.linalg.matrix_rank(V) < J:
        raise SingularSystem(f"Vandermonde rank < J = {J}")
    if V.shape[0] == J:
        try:
            c = np.linalg.solve(V, values)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
    else:
        c = np.linalg.lstsq(V, values, rcond=None)[0]
    resid = np.linalg.norm(V @ c - values)
    if resid > REAL_RESIDUAL_RTOL * max(np.linalg.norm(values), 1.0):
        raise SingularSystem(f"residual {resid:.3e} fails verification")
    return c


def interpolate(samples, n, d, field=None):
    """The unique coefficient vector matching every sample.

    Raises :class:`SingularSystem` when the points do not determine it.
    """
    V = vandermonde_matrix(samples.points, n, d, field)
    if V.shape[0] < V.shape[1]:
        raise SingularSystem(f"{V.shape[0]} samples cannot determine J = {V.shape[1]} coefficients")
    if field is not None:
        vals = [int(v) for v in samples.values]
        return _solve_ff(V, vals, field)
    return _solve_real(V, samples.values)


def sample(c, points, n, d, field=None):
    """Query the black box at every point."""
    pts = np.asarray(points).reshape(-1, n)
    vals = monomial.eval_poly(c, pts, n, d, field)
    return SampleSet([tuple(p) for p in pts.tolist()], list(np.asarray(vals).tolist()))


def sample_full_rank_points(field, n, d, rng=None, max_attempts=MAX_ATTEMPTS):
    """J distinct points whose Vandermonde matrix is invertible.

    ``field=None`` draws real Gaussian points.
    """
    rng = np.random.default_rng(rng)
    J = monomial.num_monomials(n, d)
    if field is None:
        for _ in range(max_attempts):
            pts = rng.standard_normal((J, n))
            if np.linalg.matrix_rank(vandermonde_matrix(pts, n, d)) == J:
                return pts
        raise Exhausted("no full-rank real point set found")
    total = field.q**n
    if total < J:
        raise Exhausted(f"F_{field.q}^{n} has {total} points, fewer than J = {J}")
    place = field.q ** np.arange(n - 1, -1, -1)
    for _ in range(max_attempts):
        idx = rng.choice(total, size=J, replace=False)
        pts = (idx[:, None] // place) % field.q
        if rank_ff(vandermonde_matrix(pts, n, d, field), field) == J:
            return pts
    raise Exhausted(f"no invertible Vandermonde set after {max_attempts} attempts")
