"""Command-line entry point: ``polyquery <subcommand> [flags]``.

Exit codes: 0 success, 1 usage or resource error, 2 the computation ran but
disagrees with the expected value.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from . import __version__, classical, qsim, secant, waring, zmap
from .errors import PolyQueryError, SingularSystem
from .ffield import ff_make, field_for_q

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2
TOL_PROB = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    field: dict | None
    n: int | None
    d: int | None
    k: int | None
    kmax: int | None
    q_list: list
    seed: int
    out: str | None
    format: str
    work_cap: int
    extra: dict = field(default_factory=dict)


def _int_list(text):
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("field")
    g.add_argument("--p", type=int, help="field characteristic")
    g.add_argument("--r", type=int, default=1, help="extension degree")
    g.add_argument("--modulus", type=_int_list, help="irreducible modulus, low-to-high, comma separated")
    g.add_argument("--q-list", type=_int_list, dest="q_list", help="comma separated field orders to sweep")
    g.add_argument("--field", choices=["real", "complex"], default="real", help="scalar field for typical-rank")
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--kmax", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--restarts", type=int, default=20)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=secant.DEFAULT_TRIALS)
    common.add_argument("--prime", type=int, default=secant.DEFAULT_PRIME)
    common.add_argument("--format", choices=["csv", "json"], default="json")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--work-cap", type=float, default=zmap.WORK_CAP, dest="work_cap")
    common.add_argument("--strategy", choices=["auto", "exhaustive", "sumset"], default="auto")
    common.add_argument("--dump", help="directory for range dump files (range)")
    common.add_argument("--gram", action="store_true", help="include Gram rank (simulate)")

    parser = _Parser(prog="polyquery", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    helps = {
        "range": "enumerate R_k and tabulate |R_k|/q^J",
        "simulate": "state-vector simulation with c-independence check",
        "gram": "Gram-matrix rank versus |R_k|",
        "classical": "Vandermonde interpolation round trips",
        "secant-dim": "secant dimension table against the closed form",
        "kc": "computed k_C versus the closed form",
        "typical-rank": "Monte Carlo rank-k membership fraction over R or C",
        "report": "quantum versus classical query counts",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _fields(args):
    if args.q_list:
        return [field_for_q(q) for q in args.q_list]
    if args.p is not None:
        return [ff_make(args.p, args.r, args.modulus)]
    return []


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required flags: " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _ks(args, default=None):
    if args.kmax is not None:
        return list(range(args.k if args.k is not None else 1, args.kmax + 1))
    if args.k is not None:
        return [args.k]
    if default is None:
        raise UsageError("need --k or --kmax")
    return list(default)


def _field_row(f):
    return {"q": f.q, "p": f.p, "r": f.r, "modulus": ",".join(map(str, f.modulus))}


# --- subcommands ----------------------------------------------------------


def cmd_range(args, cfg):
    _require(args, "n", "d")
    fields = _fields(args)
    if not fields:
        raise UsageError("need --p or --q-list")
    ks = _ks(args)
    rows, ok = [], True
    for f in fields:
        strategy = "sumset" if args.strategy in ("auto", "sumset") else "exhaustive"
        seq = zmap.range_sequence(f, args.n, args.d, max(ks), strategy, work_cap=int(args.work_cap))
        for k in ks:
            rs = seq[k]
            ratio, ratio_f = zmap.range_ratio(rs)
            rows.append({
                **_field_row(f), "n": args.n, "d": args.d, "k": k, "J": rs.J, "size": rs.size,
                "ratio_exact": f"{ratio.numerator}/{ratio.denominator}", "ratio": ratio_f,
                "strategy": rs.strategy,
            })
            ok &= rs.size <= f.q**rs.J and (k == 0 or seq[k - 1].size <= rs.size)
            if args.dump:
                from pathlib import Path

                Path(args.dump).mkdir(parents=True, exist_ok=True)
                zmap.write_range_dump(rs, Path(args.dump) / f"range_q{f.q}_n{args.n}_d{args.d}_k{k}.csv")
    return rows, ok


def cmd_simulate(args, cfg):
    _require(args, "n", "d")
    fields = _fields(args)
    if not fields:
        raise UsageError("need --p or --q-list")
    rows, ok = [], True
    rng = np.random.default_rng(args.seed)
    for f in fields:
        for k in _ks(args):
            rs = zmap.enumerate_range(f, args.n, args.d, k, args.strategy, int(args.work_cap))
            rep = qsim.simulate(rs, rng=rng, gram=args.gram)
            rep.pop("field")
            rows.append({**_field_row(f), **rep})
            ok &= rep["c_independence_maxdev"] <= TOL_PROB
    return rows, ok


def cmd_gram(args, cfg):
    _require(args, "n", "d")
    fields = _fields(args)
    if not fields:
        raise UsageError("need --p or --q-list")
    rows, ok = [], True
    for f in fields:
        for k in _ks(args):
            rs = zmap.enumerate_range(f, args.n, args.d, k, args.strategy, int(args.work_cap))
            rank = qsim.numerical_rank(qsim.gram_matrix(rs))
            rows.append({**_field_row(f), "n": args.n, "d": args.d, "k": k, "J": rs.J,
                         "gram_rank": rank, "bound": rs.size, "equal": rank == rs.size})
            ok &= rank <= rs.size
    return rows, ok


def cmd_classical(args, cfg):
    _require(args, "n", "d")
    fields = _fields(args)
    trials = args.samples or 100
    rng = np.random.default_rng(args.seed)
    J = comb(args.n + args.d, args.d)
    rows, ok = [], True
    for f in fields or [None]:
        recovered = singular = 0
        for _ in range(trials):
            if f is None:
                c = rng.standard_normal(J)
            else:
                c = rng.integers(0, f.q, J)
            pts = classical.sample_full_rank_points(f, args.n, args.d, rng)
            got = classical.interpolate(classical.sample(c, pts, args.n, args.d, f), args.n, args.d, f)
            recovered += bool(np.array_equal(got, c) if f is not None else np.allclose(got, c, atol=1e-6))
            try:
                classical.interpolate(classical.sample(c, pts[:-1], args.n, args.d, f), args.n, args.d, f)
            except SingularSystem:
                singular += 1
        row = _field_row(f) if f is not None else {"q": "real", "p": "", "r": "", "modulus": ""}
        rows.append({**row, "n": args.n, "d": args.d, "queries": J, "trials": trials,
                     "recovered": recovered, "singular_with_fewer": singular})
        ok &= recovered == trials and singular == trials
    return rows, ok


def cmd_secant_dim(args, cfg):
    _require(args, "n", "d")
    reports = secant.sweep(args.n, args.d, rng=args.seed, kmax=args.kmax,
                           prime=args.prime, trials=args.trials)
    rows = [r.row() for r in reports]
    return rows, all(r.matches for r in reports)


def cmd_kc(args, cfg):
    _require(args, "n", "d")
    observed = secant.compute_kc(args.n, args.d, rng=args.seed, prime=args.prime, trials=args.trials)
    formula = secant.kc_formula(args.n, args.d)
    row = {"n": args.n, "d": args.d, "formula": formula, "observed": observed, "match": observed == formula}
    return [row], observed == formula


def cmd_typical_rank(args, cfg):
    _require(args, "n", "d")
    mc = waring.MCConfig(samples=args.samples or 1000, tolerance=args.tol, restarts=args.restarts,
                         seed=args.seed, field=args.field)
    rows = [waring.typical_rank_mc(args.n, args.d, k, mc).row() for k in _ks(args)]
    return rows, True


def cmd_report(args, cfg):
    _require(args, "n", "d")
    n, d = args.n, args.d
    J = comb(n + d, d)
    kc = secant.kc_formula(n, d)
    fq_bound = comb(n + d - 1, d - 1)
    row = {
        "n": n, "d": d, "classical_queries": J,
        "quantum_C": kc, "quantum_R_bound": 2 * kc, "quantum_Fq_bound": fq_bound,
        "speedup_C": J / kc, "speedup_R": J / (2 * kc), "speedup_Fq": J / fq_bound,
    }
    ok = fq_bound * (n + d) == d * J
    rows = [row]
    for f in _fields(args):
        k = args.k if args.k is not None else fq_bound
        rs = zmap.enumerate_range(f, n, d, k, work_cap=int(args.work_cap))
        ratio, ratio_f = zmap.range_ratio(rs)
        rows.append({"n": n, "d": d, **_field_row(f), "k": k, "success_exact": f"{ratio.numerator}/{ratio.denominator}",
                     "success": ratio_f})
    return rows, ok


COMMANDS = {
    "range": cmd_range,
    "simulate": cmd_simulate,
    "gram": cmd_gram,
    "classical": cmd_classical,
    "secant-dim": cmd_secant_dim,
    "kc": cmd_kc,
    "typical-rank": cmd_typical_rank,
    "report": cmd_report,
}


# --- output -------------------------------------------------------------


def _cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


def render(results, fmt):
    header = {"version": results["version"], "seed": results["seed"], "config": results["config"]}
    rows = results["rows"]
    if fmt == "json":
        return json.dumps({**header, "rows": rows, "ok": results["ok"]}, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps({**header, "ok": results["ok"]}, sort_keys=True) + "\n")
    cols = []
    for r in rows:
        cols.extend(c for c in r if c not in cols)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in cols])
    return buf.getvalue()


def emit_report(results, fmt="json", path=None):
    """Write ``results`` as csv or json; byte-identical for identical inputs."""
    text = render(results, fmt)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _field_spec(args):
    if args.q_list:
        return {"q": args.q_list}
    if args.p is not None:
        return {"p": args.p, "r": args.r, "modulus": args.modulus}
    return {"type": args.field}


def _config(args):
    cfg = RunConfig(
        subcommand=args.subcommand,
        field=_field_spec(args),
        n=args.n, d=args.d, k=args.k, kmax=args.kmax,
        q_list=args.q_list or [], seed=args.seed, out=args.out, format=args.format,
        work_cap=int(args.work_cap),
        extra={"samples": args.samples, "restarts": args.restarts, "tol": args.tol,
               "trials": args.trials, "prime": args.prime, "strategy": args.strategy},
    )
    return cfg


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise UsageError("a subcommand is required")
        cfg = _config(args)
        rows, ok = COMMANDS[args.subcommand](args, cfg)
    except UsageError as exc:
        print(f"polyquery: usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (PolyQueryError, ValueError, OSError) as exc:
        print(f"polyquery: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    config = asdict(cfg)
    config.pop("out")
    results = {"version": __version__, "seed": args.seed, "config": config, "rows": rows, "ok": bool(ok)}
    try:
        emit_report(results, args.format, args.out)
    except OSError as exc:
        print(f"polyquery: cannot write report: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if ok else EXIT_MISMATCH


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
