"""Acceptance gate: one test per criterion, each reporting a pass/fail line."""
import itertools
import json
import time
from math import comb

import numpy as np
import pytest

from polyquery import cli, qsim
from polyquery.classical import interpolate, sample, sample_full_rank_points
from polyquery.errors import SingularSystem
from polyquery.ffield import field_for_q, ff_make
from polyquery.secant import compute_kc, kc_formula, sweep
from polyquery.waring import MCConfig, residual_and_jacobian, typical_rank_mc
from polyquery.zmap import WORK_CAP, enumerate_range, range_ratio, range_sequence

FIELDS_UP_TO_16 = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def _field(q):
    return ff_make(2, 4, (1, 1, 0, 0, 1)) if q == 16 else field_for_q(q)


def test_1_exact_success_probability(record):
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for q, n, d in itertools.product((2, 3, 5), (1, 2), (1, 2, 3)):
        seq = range_sequence(ff_make(q), n, d, 4)
        for k in range(1, 5):
            rs = seq[k]
            rep = qsim.simulate(rs, rng=np.random.default_rng([q, n, d, k]))
            exact = float(qsim.success_prob_formula(rs))
            worst = max(worst, abs(rep["success_simulated"] - exact), rep["c_independence_maxdev"])
            count += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 120
    record(1, ok, f"{count} instances, max |P - |R_k|/q^J| = {worst:.1e}, {elapsed:.1f} s")
    assert ok


def test_2_univariate_threshold(record):
    t0 = time.perf_counter()
    k2, k1, k3 = {}, {}, {}
    for q in (5, 7, 11, 13):
        seq = range_sequence(ff_make(q), 1, 3, 3)
        k1[q], k2[q], k3[q] = (range_ratio(seq[k])[1] for k in (1, 2, 3))
    elapsed = time.perf_counter() - t0
    ok_k2 = all(k2[q] >= 1 - 6 / q for q in k2)
    ok_k1 = all(v <= 0.5 for v in k1.values())
    ok = ok_k2 and ok_k1 and elapsed < 60
    fmt = lambda m: ", ".join(f"q={q}: {v:.4f}" for q, v in m.items())
    record(2, ok, f"k=2 needs >= 1-6/q, got [{fmt(k2)}]; k=1 <= 0.5: {ok_k1}; "
                  f"(k=3: [{fmt(k3)}]); {elapsed:.1f} s")
    assert ok_k1, "k=1 ratio above 0.5"
    assert ok_k2, f"k=2 ratios {k2} below 1-6/q"


def test_3_quadratic_threshold(record):
    t0 = time.perf_counter()
    rows = []
    ok = True
    for q in (3, 5, 7):
        seq = range_sequence(ff_make(q), 2, 2, 3, strategy="sumset")
        r3, r2 = range_ratio(seq[3])[1], range_ratio(seq[2])[1]
        ok &= r3 >= 1 - 8 / q and r2 <= 10 / q
        rows.append(f"q={q}: R3 {r3:.4f}, R2 {r2:.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    record(3, ok, "; ".join(rows) + f"; {elapsed:.1f} s")
    assert ok


def test_4_gram_bound(record):
    t0 = time.perf_counter()
    rows, ok = [], True
    for (n, d), k in itertools.product([(1, 1), (1, 2), (2, 1)], (1, 2)):
        rank, bound = qsim.gram_rank_bound(ff_make(2), n, d, k)
        ok &= rank <= bound
        rows.append(f"({n},{d},{k}) {rank}<={bound}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    record(4, ok, ", ".join(rows) + f"; {elapsed:.1f} s")
    assert ok


def test_5_alexander_hirschowitz_table(record):
    t0 = time.perf_counter()
    reports = sweep(4, 5, rng=20240, trials=3)
    bad = [r.row() for r in reports if not r.matches]
    dims = {(r.n, r.d, r.k): r.observed_dim for r in reports}
    special = {(4, 3, 7): 34, (2, 4, 5): 14, (3, 4, 9): 34, (4, 4, 14): 69}
    for n in range(2, 5):
        for k in range(2, n + 1):
            special[(n, 2, k)] = k * (n + 1) - k * (k - 1) // 2
    special_ok = all(dims[key] == val for key, val in special.items())
    elapsed = time.perf_counter() - t0
    ok = not bad and special_ok and elapsed < 120
    record(5, ok, f"{len(reports)} instances, {len(bad)} mismatches, defective/d=2 values ok: {special_ok}, {elapsed:.1f} s")
    assert ok, bad


def test_6_kc_agreement(record):
    t0 = time.perf_counter()
    bad = []
    for n, d in itertools.product(range(1, 5), range(1, 6)):
        got = compute_kc(n, d, rng=[n, d])
        if got != kc_formula(n, d):
            bad.append((n, d, got, kc_formula(n, d)))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    record(6, ok, f"20 pairs, mismatches {bad}, {elapsed:.1f} s")
    assert ok


def test_7_typical_rank_transitions(record):
    t0 = time.perf_counter()
    cases = [
        ("complex", 1, 3, 2, lambda f: f >= 0.99),
        ("real", 1, 3, 2, lambda f: 0.05 < f < 0.95),
        ("real", 1, 3, 3, lambda f: f >= 0.99),
        ("real", 2, 2, 2, lambda f: f <= 0.01),
        ("real", 2, 2, 3, lambda f: f >= 0.99),
    ]
    rows, ok = [], True
    for field, n, d, k, check in cases:
        res = typical_rank_mc(n, d, k, MCConfig(samples=1000, seed=2024, field=field))
        ok &= check(res.fraction)
        rows.append(f"{field[0].upper()}({n},{d},{k}) {res.fraction:.3f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    record(7, ok, ", ".join(rows) + f"; {elapsed:.1f} s")
    assert ok


def test_8_classical_baseline(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    # every (q, n, d) with q <= 13, n <= 2, d <= 3 for which J points with an
    # invertible Vandermonde matrix exist (this needs d < q, since x^q = x)
    configs = [(q, n, d) for q in (2, 3, 4, 5, 7, 8, 9, 11, 13) for n in (1, 2) for d in (1, 2, 3) if d < q]
    recovered = singular = 0
    trials = 1000
    for t in range(trials):
        q, n, d = configs[t % len(configs)]
        f = field_for_q(q)
        c = rng.integers(0, q, comb(n + d, d))
        pts = sample_full_rank_points(f, n, d, rng)
        recovered += interpolate(sample(c, pts, n, d, f), n, d, f).tolist() == c.tolist()
        try:
            interpolate(sample(c, pts[:-1], n, d, f), n, d, f)
        except SingularSystem:
            singular += 1
    elapsed = time.perf_counter() - t0
    ok = recovered == trials and singular == trials and elapsed < 60
    record(8, ok, f"{len(configs)} configs, recovered {recovered}/{trials}, "
                  f"SingularSystem with J-1 points {singular}/{trials}, {elapsed:.1f} s")
    assert ok


def _field_axioms(f):
    a = np.arange(f.q)
    A, B = np.meshgrid(a, a, indexing="ij")
    add, mul = f.add_table, f.mul_table
    ok = np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    # associativity and distributivity over all triples
    s = add[A, B]
    ok &= all(np.array_equal(add[s, c], add[A, add[B, c]]) for c in a)
    p = mul[A, B]
    ok &= all(np.array_equal(mul[p, c], mul[A, mul[B, c]]) for c in a)
    ok &= all(np.array_equal(mul[A, add[B, c]], add[mul[A, B], mul[A, c]]) for c in a)
    ok &= np.all(add[0] == a) and np.all(mul[1] == a)
    # unique inverses
    ok &= np.all((add == 0).sum(axis=1) == 1)
    ok &= np.all((mul[1:] == 1).sum(axis=1) == 1) and not np.any(mul[0] == 1)
    return bool(ok)


def _jacobian_check(rng, count=100):
    worst = 0.0
    for i in range(count):
        field = "complex" if i % 2 else "real"
        n, d, k = int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(1, 4))
        J = comb(n + d, d)
        xs, ys, c = rng.uniform(-1, 1, (k, n)), rng.uniform(-1, 1, k), rng.standard_normal(J)
        if field == "complex":
            xs = xs + 1j * rng.uniform(-1, 1, (k, n))
            ys = ys + 1j * rng.uniform(-1, 1, k)
            c = c + 1j * rng.standard_normal(J)
        flat = np.concatenate([xs.ravel(), ys])
        theta = np.column_stack([flat.real, flat.imag]).ravel() if field == "complex" else flat.real

        def resid(t):
            v = t[0::2] + 1j * t[1::2] if field == "complex" else t
            return residual_and_jacobian((v[: k * n].reshape(k, n), v[k * n :]), c, n, d, field)[0]

        _, jac = residual_and_jacobian((xs, ys), c, n, d, field)
        h = 1e-6
        fd = np.stack([(resid(theta + h * e) - resid(theta - h * e)) / (2 * h) for e in np.eye(theta.size)], axis=1)
        worst = max(worst, np.max(np.abs(jac - fd)) / max(1.0, np.max(np.abs(fd))))
    return worst


def _strategy_instances(limit=10**7):
    out = []
    for q in (2, 3, 4, 5, 7, 8, 9, 11, 13):
        for n in (1, 2, 3):
            for d in range(1, 5):
                J = comb(n + d, d)
                if q**J >= 2**63:
                    continue
                k = 2
                while q ** (k * (n + 1)) <= limit:
                    out.append((q, n, d, k))
                    k += 1
    return out


def _cli_deterministic(tmp_path):
    runs = {
        "range": ["range", "--q-list", "2,3", "--n", "1", "--d", "2", "--kmax", "3"],
        "simulate": ["simulate", "--p", "3", "--n", "1", "--d", "2", "--kmax", "2"],
        "gram": ["gram", "--p", "2", "--n", "1", "--d", "2", "--kmax", "2"],
        "classical": ["classical", "--q-list", "5,7", "--n", "2", "--d", "2", "--samples", "20"],
        "secant-dim": ["secant-dim", "--n", "3", "--d", "3"],
        "kc": ["kc", "--n", "2", "--d", "4"],
        "typical-rank": ["typical-rank", "--n", "1", "--d", "3", "--kmax", "3", "--samples", "30", "--seed", "5"],
        "report": ["report", "--n", "2", "--d", "3", "--p", "3"],
    }
    same = []
    for name, argv in runs.items():
        for fmt in ("json", "csv"):
            blobs = []
            for i in range(2):
                path = tmp_path / f"{name}-{fmt}-{i}"
                assert cli.run(argv + ["--format", fmt, "--out", str(path)]) == 0
                blobs.append(path.read_bytes())
            same.append(blobs[0] == blobs[1])
    return all(same), len(same)


def test_9_property_suites(record, tmp_path):
    t0 = time.perf_counter()
    axioms = {q: _field_axioms(_field(q)) for q in FIELDS_UP_TO_16}
    jac_err = _jacobian_check(np.random.default_rng(99))
    instances = _strategy_instances()
    mismatched = []
    for q, n, d, k in instances:
        f = field_for_q(q)
        a = enumerate_range(f, n, d, k, strategy="exhaustive", work_cap=WORK_CAP)
        b = enumerate_range(f, n, d, k, strategy="sumset", work_cap=WORK_CAP)
        if not (np.array_equal(a.keys, b.keys) and np.array_equal(a.reps, b.reps)):
            mismatched.append((q, n, d, k))
    cli_ok, cli_runs = _cli_deterministic(tmp_path)
    elapsed = time.perf_counter() - t0
    ok = all(axioms.values()) and jac_err <= 1e-5 and not mismatched and cli_ok
    record(9, ok, f"field axioms q<=16: {all(axioms.values())}; Jacobian max rel err {jac_err:.1e}; "
                  f"strategy equivalence {len(instances) - len(mismatched)}/{len(instances)}; "
                  f"CLI byte-stable {cli_runs} runs: {cli_ok}; {elapsed:.1f} s")
    assert ok
