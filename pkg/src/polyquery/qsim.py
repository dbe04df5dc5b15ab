"""State-vector simulation of the k-query finite-field interpolation algorithm.

States live in the basis {|z> : z in R_k}: after computing Z in place, the
(x, y) register of the uniform superposition over canonical preimages is
uniquely determined by z, so nothing else needs to be stored.

Phases are computed through the trace form. Writing z_j = sum_t z_jt beta_t
in the polynomial basis beta_t = t^t,

    tr(z . c) = sum_{j,t} z_jt * tr(beta_t * c_j)   (mod p),

so a batch of secrets becomes one integer matrix product against the base-p
digits of the range keys.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SizeCap
from .zmap import RangeSet, enumerate_range, range_ratio, _keys_to_components

FULL_MODE_CAP = 10**6
GRAM_CAP = 4096
RANK_RTOL = 1e-8
_BLOCK = 2**18


@dataclass(eq=False)
class StateVector:
    range_set: RangeSet
    amplitudes: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


def _trace_weights(field, secrets):
    """W[(j, t), s] = tr(beta_t * c_sj) for secrets of shape (S, J)."""
    secrets = np.atleast_2d(np.asarray(secrets, dtype=np.int64))
    basis = field.p ** np.arange(field.r)
    w = field.trace_mul_table[basis[None, None, :], secrets[:, :, None]]
    return w.reshape(secrets.shape[0], -1).T.astype(np.float64)


def _phase_indices(rs, secrets, rows=slice(None)):
    """tr(z . c) mod p for z in ``rs`` (rows) and each secret; shape (N, S)."""
    # exact in float32: every partial sum is below r*J*(p-1)^2 << 2^24
    prod = rs.digits_float[rows] @ _trace_weights(rs.field, secrets).astype(np.float32)
    return np.rint(prod).astype(np.int64) % rs.field.p


def _check_secret(rs, c):
    c = np.asarray([int(v) for v in c], dtype=np.int64)
    if c.shape != (rs.J,):
        raise DimensionMismatch(f"secret must have {rs.J} coefficients, got {c.shape}")
    if np.any((c < 0) | (c >= rs.q)):
        raise DimensionMismatch("secret entries must be field encodings")
    return c


def prepare_state(rs):
    """Uniform superposition over T_k, written in the |z> basis."""
    if rs.size == 0:
        raise ValueError("empty range set")
    amp = np.full(rs.size, 1.0 / np.sqrt(rs.size), dtype=np.complex128)
    return StateVector(rs, amp)


def phases(rs, c):
    """e(z . c) for every z in the range."""
    c = _check_secret(rs, c)
    roots = rs.field.roots_of_unity
    out = np.empty(rs.size, dtype=np.complex128)
    for a in range(0, rs.size, _BLOCK):
        rows = slice(a, a + _BLOCK)
        out[rows] = roots[_phase_indices(rs, c[None, :], rows)[:, 0]]
    return out


def apply_phase_queries(s, c):
    """k parallel phase queries for the polynomial with coefficients ``c``."""
    return StateVector(s.range_set, s.amplitudes * phases(s.range_set, c))


def fourier_overlap(s, c_prime):
    """<c~'|psi> where |c~'> = q^(-J/2) sum_z e(z . c')|z>."""
    rs = s.range_set
    return np.vdot(phases(rs, c_prime), s.amplitudes) / np.sqrt(float(rs.q) ** rs.J)


def measure_fourier(s, c_true, mode="success_only"):
    """Outcome probabilities of the Fourier-basis measurement.

    ``success_only`` returns P(c_true). ``full`` returns
    ``(P(c_true), dist)`` where ``dist[key(c')]`` is P(c') for all q^J
    outcomes, keyed like range elements.
    """
    rs = s.range_set
    c_true = _check_secret(rs, c_true)
    if mode == "success_only":
        return float(abs(fourier_overlap(s, c_true)) ** 2)
    if mode != "full":
        raise ValueError(f"unknown mode {mode!r}")
    total = rs.q**rs.J
    if total > FULL_MODE_CAP:
        raise SizeCap(f"full distribution over q^J = {total} outcomes exceeds {FULL_MODE_CAP}")
    roots = rs.field.roots_of_unity
    norm = np.sqrt(float(total))
    dist = np.empty(total)
    batch = max(1, _BLOCK // max(rs.size, 1))
    for a in range(0, total, batch):
        keys = np.arange(a, min(total, a + batch), dtype=np.int64)
        cands = _keys_to_components(keys, rs.q, rs.J).astype(np.int64)
        ph = roots[_phase_indices(rs, cands)]  # (N, B)
        amp = ph.conj().T @ s.amplitudes / norm
        dist[a : a + keys.size] = np.abs(amp) ** 2
    key_true = int(np.dot(c_true, rs.q ** np.arange(rs.J, dtype=np.int64)))
    return float(dist[key_true]), dist


def success_prob_formula(rs):
    """|R_k| / q^J, exact."""
    return range_ratio(rs)[0]


def run_algorithm(rs, c):
    """prepare -> query -> measure; P(correct) for secret ``c``."""
    return measure_fourier(apply_phase_queries(prepare_state(rs), c), c)


def c_independence(rs, secrets):
    """Success probability for each secret; the spread should be ~0."""
    return np.array([run_algorithm(rs, c) for c in secrets])


def all_secrets(field, J):
    total = field.q**J
    return _keys_to_components(np.arange(total, dtype=np.int64), field.q, J).astype(np.int64)


def gram_matrix(rs):
    """G[c, c'] = <psi_c'|psi_c> over all q^J secrets."""
    total = rs.q**rs.J
    if total > GRAM_CAP:
        raise SizeCap(f"Gram matrix of size q^J = {total} exceeds {GRAM_CAP}")
    base = prepare_state(rs)
    states = np.stack([apply_phase_queries(base, c).amplitudes for c in all_secrets(rs.field, rs.J)])
    return states.conj() @ states.T


def numerical_rank(G, rtol=RANK_RTOL):
    w = np.linalg.eigvalsh(G)
    top = w.max(initial=0.0)
    if top <= 0:
        return 0
    return int(np.sum(w > rtol * top))


def gram_rank_bound(field, n, d, k, rs=None, work_cap=None):
    """(numerical rank of the post-query Gram matrix, |R_k|).

    Raises AssertionError if the rank ever exceeds |R_k|.
    """
    if rs is None:
        kwargs = {} if work_cap is None else {"work_cap": work_cap}
        rs = enumerate_range(field, n, d, k, **kwargs)
    rank = numerical_rank(gram_matrix(rs))
    if rank > rs.size:
        raise AssertionError(f"Gram rank {rank} exceeds |R_k| = {rs.size}")
    return rank, rs.size


def simulate(rs, secrets=None, n_random=100, rng=None, gram=False):
    """Full pipeline plus c-independence check; returns the report dict.

    Every secret is tried when q^J <= 1024, otherwise ``n_random`` drawn from
    ``rng``.
    """
    total = rs.q**rs.J
    if secrets is None:
        if total <= 1024:
            secrets = all_secrets(rs.field, rs.J)
        else:
            rng = np.random.default_rng(rng)
            secrets = rng.integers(0, rs.q, size=(n_random, rs.J))
    probs = c_independence(rs, secrets)
    exact = success_prob_formula(rs)
    report = {
        "field": rs.field.describe(),
        "n": rs.n,
        "d": rs.d,
        "k": rs.k,
        "J": rs.J,
        "range_size": rs.size,
        "success_exact": f"{exact.numerator}/{exact.denominator}",
        "success_float": float(exact),
        "success_simulated": float(probs[0]),
        "c_independence_maxdev": float(np.max(np.abs(probs - float(exact)))),
        "secrets_tested": int(len(probs)),
    }
    if gram:
        report["gram_rank"] = gram_rank_bound(rs.field, rs.n, rs.d, rs.k, rs=rs)[0]
    return report


__all__ = [
    "StateVector",
    "prepare_state",
    "apply_phase_queries",
    "measure_fourier",
    "gram_rank_bound",
    "success_prob_formula",
    "simulate",
]
