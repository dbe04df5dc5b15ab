"""Numerical rank-k membership and Monte Carlo success measures over R and C.

A coefficient vector c is in R_k when c = sum_i y_i v_d(x_i) for some k
points x_i and scalars y_i. Membership is decided numerically by a damped
Gauss-Newton (Levenberg-Marquardt) fit from several random starts; a
``False`` only means no decomposition was found.

Complex problems are solved on real pairs: z -> (Re z, Im z) for both the
parameters and the residual, interleaved per coordinate.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from ._workers import pmap
from .monomial import eval_veronese, exponent_array, num_monomials

FIELDS = ("real", "complex")
SAMPLERS = ("gaussian", "sphere", "cube")


@dataclass(frozen=True)
class MCConfig:
    samples: int = 1000
    tolerance: float = 1e-6
    restarts: int = 20
    seed: int = 0
    field: str = "real"
    sampler: str = "gaussian"
    max_iter: int = 500
    wave: int = 4

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}")


@dataclass
class WaringFit:
    xs: np.ndarray
    ys: np.ndarray
    residual: float
    converged: bool
    iterations: int

    def reconstruct(self, d):
        n = self.xs.shape[1]
        return self.ys @ eval_veronese(self.xs, n, d)


# --- model ----------------------------------------------------------------


def _model(X, Y, C, d):
    """Residuals R (B, J) and holomorphic Jacobian (B, J, k*n + k)."""
    B, k, n = X.shape
    exps = exponent_array(n, d)
    pw = X[..., None] ** np.arange(d + 1)  # (B, k, n, d+1)
    lower = np.maximum(exps - 1, 0)
    fac = np.stack([pw[:, :, m, :][:, :, exps[:, m]] for m in range(n)], axis=2)
    dfac = np.stack(
        [exps[:, m] * pw[:, :, m, :][:, :, lower[:, m]] for m in range(n)], axis=2
    )  # (B, k, n, J); exps == 0 kills the x^-1 term
    V = np.prod(fac, axis=2)
    R = np.einsum("bi,bij->bj", Y, V) - C
    dX = np.empty_like(dfac)
    for m in range(n):
        others = np.ones_like(V)
        for mm in range(n):
            if mm != m:
                others = others * fac[:, :, mm, :]
        dX[:, :, m, :] = dfac[:, :, m, :] * others
    dX = dX * Y[:, :, None, None]
    jac = np.concatenate([dX.reshape(B, k * n, -1), V], axis=1).transpose(0, 2, 1)
    return R, jac


def _to_real_pairs(z):
    """Interleave real and imaginary parts along the last axis."""
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def _from_real_pairs(v):
    return v[..., 0::2] + 1j * v[..., 1::2]


def _real_jacobian(G):
    """Real Jacobian of a holomorphic map on interleaved pairs."""
    B, m, p = G.shape
    out = np.empty((B, 2 * m, 2 * p))
    out[:, 0::2, 0::2] = G.real
    out[:, 0::2, 1::2] = -G.imag
    out[:, 1::2, 0::2] = G.imag
    out[:, 1::2, 1::2] = G.real
    return out


def _pack(X, Y, complex_):
    theta = np.concatenate([X.reshape(X.shape[0], -1), Y], axis=1)
    return _to_real_pairs(theta) if complex_ else theta


def _unpack(theta, k, n, complex_):
    if complex_:
        theta = _from_real_pairs(theta)
    X = theta[:, : k * n].reshape(-1, k, n)
    Y = theta[:, k * n :]
    return X, Y


def _batch_residual(theta, C, k, n, d, complex_):
    X, Y = _unpack(theta, k, n, complex_)
    R, G = _model(X, Y, C, d)
    if complex_:
        return _to_real_pairs(R), _real_jacobian(G)
    return R, G


def residual_and_jacobian(params, c, n, d, field="real"):
    """Residual sum_i y_i v_d(x_i) - c and its Jacobian.

    ``params`` is ``(xs, ys)`` with ``xs`` of shape (k, n). Parameters are
    ordered x_1, ..., x_k (coordinates within each) then y_1..y_k. For
    ``field="complex"`` both residual and parameters are taken as real pairs.
    """
    complex_ = field == "complex"
    xs, ys = params
    dtype = complex if complex_ else float
    X = np.asarray(xs, dtype=dtype).reshape(1, -1, n)
    Y = np.asarray(ys, dtype=dtype).reshape(1, -1)
    C = np.asarray(c, dtype=dtype).reshape(1, -1)
    if C.shape[1] != num_monomials(n, d):
        raise ValueError(f"c must have length {num_monomials(n, d)}")
    R, Jm = _batch_residual(_pack(X, Y, complex_), C, X.shape[1], n, d, complex_)
    return R[0], Jm[0]


# --- batched Levenberg-Marquardt -----------------------------------------


def _levenberg_marquardt(theta, C, k, n, d, complex_, target, max_iter):
    """Minimise ||r||^2 independently for every row of ``theta``.

    ``target`` (B,) is the residual norm at which a row counts as converged.
    Damping follows the Madsen-Nielsen gain-ratio update.
    """
    B, P = theta.shape
    R, Jm = _batch_residual(theta, C, k, n, d, complex_)
    cost = np.einsum("bm,bm->b", R, R)
    mu = 1e-3 * np.max(np.einsum("bmp,bmp->bp", Jm, Jm), axis=1) + 1e-12
    nu = np.full(B, 2.0)
    iters = np.zeros(B, dtype=np.int64)
    converged = np.sqrt(cost) <= target
    stalled = np.zeros(B, dtype=np.int64)
    active = ~converged
    eye = np.eye(P)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ja, Ra, th = Jm[idx], R[idx], theta[idx]
        A = Ja.transpose(0, 2, 1) @ Ja
        g = np.einsum("bmp,bm->bp", Ja, Ra)
        try:
            step = -np.linalg.solve(A + mu[idx, None, None] * eye, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = -np.stack([np.linalg.lstsq(a + m * eye, gg, rcond=None)[0]
                              for a, m, gg in zip(A, mu[idx], g)])
        new = th + step
        Rn, Jn = _batch_residual(new, C[idx], k, n, d, complex_)
        cost_n = np.einsum("bm,bm->b", Rn, Rn)
        pred = np.einsum("bp,bp->b", step, mu[idx, None] * step - g)
        ok = np.isfinite(cost_n)
        rho = np.where(ok & (pred > 0), (cost[idx] - cost_n) / np.where(pred > 0, pred, 1.0), -1.0)
        accept = ok & (rho > 0)
        iters[idx] += 1

        a_idx = idx[accept]
        improvement = (cost[a_idx] - cost_n[accept]) / np.maximum(cost[a_idx], 1e-300)
        theta[a_idx] = new[accept]
        R[a_idx], Jm[a_idx], cost[a_idx] = Rn[accept], Jn[accept], cost_n[accept]
        mu[a_idx] *= np.maximum(1.0 / 3.0, 1.0 - (2.0 * rho[accept] - 1.0) ** 3)
        nu[a_idx] = 2.0
        r_idx = idx[~accept]
        mu[r_idx] *= nu[r_idx]
        nu[r_idx] *= 2.0

        stalled[a_idx] = np.where(improvement < 1e-12, stalled[a_idx] + 1, 0)
        stalled[r_idx] += 1
        converged[idx] = np.sqrt(cost[idx]) <= target[idx]
        active[idx] = ~converged[idx] & (stalled[idx] < 40) & (mu[idx] < 1e20)
    return theta, np.sqrt(cost), converged, iters


def _random_points(rng, shape, complex_):
    x = rng.standard_normal(shape)
    if complex_:
        x = (x + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return x


def _initial_guess(rng, c, n, d, k, restarts, complex_):
    """Random points; multipliers from the linear least-squares fit to c."""
    X = _random_points(rng, (restarts, k, n), complex_)
    V = eval_veronese(X, n, d)  # (R, k, J)
    Y = np.linalg.pinv(V.transpose(0, 2, 1)) @ c
    return X, Y


def _linear_fit(rng, c, n, d, k, complex_):
    """k >= J: J generic points make the Veronese vectors a basis."""
    J = num_monomials(n, d)
    X = _random_points(rng, (k, n), complex_)
    V = eval_veronese(X[:J], n, d)
    Y = np.zeros(k, dtype=V.dtype)
    Y[:J] = np.linalg.solve(V.T, c)
    return X, Y


def _fit_batch(cs, inits, n, d, k, cfg):
    """Run LM on stacked problems; cs (B, J), inits (X (B,k,n), Y (B,k))."""
    complex_ = cfg.field == "complex"
    X, Y = inits
    theta = _pack(X, Y, complex_)
    C = cs.astype(complex if complex_ else float)
    target = cfg.tolerance * np.linalg.norm(C, axis=1)
    theta, resid, conv, iters = _levenberg_marquardt(
        theta, C, k, n, d, complex_, target, cfg.max_iter
    )
    X, Y = _unpack(theta, k, n, complex_)
    return X, Y, resid, conv, iters


def fit_rank_k(c, n, d, k, cfg=None, rng=None):
    """Best of ``cfg.restarts`` LM fits of c by k Veronese terms."""
    cfg = cfg or MCConfig()
    complex_ = cfg.field == "complex"
    c = np.asarray(c, dtype=complex if complex_ else float)
    J = num_monomials(n, d)
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    cnorm = float(np.linalg.norm(c))
    if cnorm == 0.0:
        X = _random_points(rng, (k, n), complex_)
        return WaringFit(X, np.zeros(k, dtype=X.dtype), 0.0, True, 0)
    if k >= J:
        X, Y = _linear_fit(rng, c, n, d, k, complex_)
        resid = float(np.linalg.norm(Y @ eval_veronese(X, n, d) - c))
        return WaringFit(X, Y, resid, resid <= cfg.tolerance * cnorm, 0)
    X0, Y0 = _initial_guess(rng, c, n, d, k, cfg.restarts, complex_)
    cs = np.broadcast_to(c, (cfg.restarts, J))
    X, Y, resid, conv, iters = _fit_batch(cs, (X0, Y0), n, d, k, cfg)
    best = int(np.argmin(resid))
    return WaringFit(X[best], Y[best], float(resid[best]), bool(conv[best]), int(iters[best]))


def rank_membership(c, n, d, k, cfg=None, rng=None):
    """One-sided test: True when a decomposition within tolerance was found."""
    cfg = cfg or MCConfig()
    fit = fit_rank_k(c, n, d, k, cfg, rng)
    return fit.residual <= cfg.tolerance * float(np.linalg.norm(c))


# --- Monte Carlo --------------------------------------------------------


def sample_coefficients(rng, J, field="real", sampler="gaussian"):
    if sampler == "cube":
        c = rng.uniform(-1.0, 1.0, J)
        if field == "complex":
            c = c + 1j * rng.uniform(-1.0, 1.0, J)
        return c
    c = rng.standard_normal(J)
    if field == "complex":
        c = c + 1j * rng.standard_normal(J)
    if sampler == "sphere":
        c = c / np.linalg.norm(c)
    return c


def wilson_interval(successes, total, confidence=0.95):
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    phat = successes / total
    denom = 1.0 + z * z / total
    centre = (phat + z * z / (2 * total)) / denom
    half = z * np.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return float(max(0.0, centre - half)), float(min(1.0, centre + half))


@dataclass(frozen=True)
class MCResult:
    n: int
    d: int
    k: int
    field: str
    samples: int
    successes: int
    ci_low: float
    ci_high: float
    seed: int
    tolerance: float

    @property
    def fraction(self):
        return self.successes / self.samples

    @property
    def half_width(self):
        return (self.ci_high - self.ci_low) / 2.0

    @property
    def std_error(self):
        f = self.fraction
        return float(np.sqrt(max(f * (1 - f), 1e-12) / self.samples))

    def row(self):
        return {
            "n": self.n, "d": self.d, "k": self.k, "field": self.field,
            "samples": self.samples, "fraction": self.fraction,
            "ci_low": self.ci_low, "ci_high": self.ci_high,
            "seed": self.seed, "tolerance": self.tolerance,
        }


def membership_flags(n, d, k, cfg):
    """Per-sample membership decisions, independent of batching."""
    complex_ = cfg.field == "complex"
    J = num_monomials(n, d)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.samples)
    gens = [np.random.default_rng(s) for s in children]
    cs = np.stack([sample_coefficients(g, J, cfg.field, cfg.sampler) for g in gens])
    if k >= J:
        return np.array([rank_membership(c, n, d, k, cfg, g) for c, g in zip(cs, gens)])
    inits = [_initial_guess(g, c, n, d, k, cfg.restarts, complex_) for g, c in zip(gens, cs)]
    X0 = np.stack([ini[0] for ini in inits])  # (S, restarts, k, n)
    Y0 = np.stack([ini[1] for ini in inits])
    done = np.zeros(cfg.samples, dtype=bool)
    # restarts run in waves; a sample stops once any start has converged
    for a in range(0, cfg.restarts, cfg.wave):
        todo = np.flatnonzero(~done)
        if todo.size == 0:
            break
        w = min(cfg.wave, cfg.restarts - a)
        blocks = np.array_split(todo, max(1, todo.size // 256))

        def run(block, a=a, w=w):
            cs_b = np.repeat(cs[block], w, axis=0)
            Xb = X0[block, a : a + w].reshape(-1, k, n)
            Yb = Y0[block, a : a + w].reshape(-1, k)
            conv = _fit_batch(cs_b, (Xb, Yb), n, d, k, cfg)[3]
            return conv.reshape(block.size, w).any(axis=1)

        for block, hit in zip(blocks, pmap(run, blocks)):
            done[block] |= hit
    return done


def typical_rank_mc(n, d, k, cfg=None):
    """Fraction of random c found in R_k, with a 95% Wilson interval."""
    cfg = cfg or MCConfig()
    flags = membership_flags(n, d, k, cfg)
    hits = int(flags.sum())
    lo, hi = wilson_interval(hits, cfg.samples)
    return MCResult(n, d, k, cfg.field, cfg.samples, hits, lo, hi, cfg.seed, cfg.tolerance)


def results_csv(results):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["n", "d", "k", "field", "samples", "fraction", "ci_low", "ci_high", "seed", "tolerance"]
    w.writerow(cols)
    for r in results:
        row = r.row()
        w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])
    return buf.getvalue()
