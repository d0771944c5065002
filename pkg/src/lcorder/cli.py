"""Command-line interface.

Exit codes: 0 success / verdict true / no violations, 1 verdict false or at
least one violated check, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import continuous as C
from . import inequalities as I
from . import pmf as P
from .divergence import entropy, kl, total_variation
from .lc_order import LC_TOL, lc_le
from .suites import SUITES, RunConfig, passed, run_suite, summarize

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _finite(obj):
    # JSON has no NaN / Infinity; non-finite numbers become null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _dumps(obj) -> str:
    return json.dumps(_finite(obj), sort_keys=True, allow_nan=False)


def load_spec(arg: str):
    """A JSON spec given inline (starting with ``{``), as ``-`` for stdin, or as a path."""
    try:
        if arg.lstrip().startswith("{"):
            text = arg
        elif arg == "-":
            text = sys.stdin.read()
        else:
            text = Path(arg).read_text()
        obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read spec {arg!r}: {e}") from e
    if not isinstance(obj, dict):
        raise InputError("a spec must be a JSON object")
    return obj


def build_pmf(obj: dict, eps_trunc: float) -> P.Pmf:
    try:
        return P.from_json(obj, eps_trunc)
    except P.DomainError as e:
        raise InputError(str(e)) from e


def build_density(obj: dict, args) -> C.GridPdf:
    try:
        if obj["kind"] == "gamma":
            return C.pdf_gamma(obj["alpha"], obj.get("beta", 1.0), args.window, args.nodes)
        return C.weighted_gamma_sum(obj["alphas"], obj["betas"], args.window, args.nodes)
    except (KeyError, TypeError, P.DomainError) as e:
        raise InputError(f"bad density spec: {e}") from e


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from e


def _write(out: str, text: str):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_dist(args) -> int:
    obj = load_spec(args.spec)
    if obj.get("kind") in ("gamma", "gamma_sum"):
        f = build_density(obj, args)
        h = C.differential_entropy(f)
        _write(args.out, f.to_csv())
        sys.stderr.write(_dumps({"mean": f.mean(), "entropy": h.to_dict(),
                                 "window": [f.lo, f.hi]}) + "\n")
        return EXIT_OK
    f = build_pmf(obj, args.eps_trunc)
    lo_m, width = P.mean_interval(f)
    rec = {"pmf": f.to_dict(), "mean": P.best_mean(f), "mean_interval": [lo_m - width, lo_m + width],
           "entropy": entropy(f).to_dict(), "support": [f.lo, f.hi], "tail_bound": f.tail_bound}
    _write(args.out, _dumps(rec) + "\n")
    return EXIT_OK


def cmd_order(args) -> int:
    f = build_pmf(load_spec(args.f), args.eps_trunc)
    g = build_pmf(load_spec(args.g), args.eps_trunc)
    rep = lc_le(f, g, args.tol_lc)
    print(_dumps(rep.to_dict()))
    return EXIT_OK if rep.verdict else EXIT_FALSE


def cmd_div(args) -> int:
    f = build_pmf(load_spec(args.f), args.eps_trunc)
    if args.measure == "entropy":
        val = entropy(f)
    else:
        if args.g is None:
            raise InputError(f"--measure {args.measure} needs a second spec")
        g = build_pmf(load_spec(args.g), args.eps_trunc)
        val = kl(f, g) if args.measure == "kl" else total_variation(f, g)
    print(_dumps({"measure": args.measure, **val.to_dict()}))
    return EXIT_OK


def cmd_approx(args) -> int:
    try:
        if args.kind == "binomial":
            ps = _float_list(args.ps or "")
            if not ps:
                raise InputError("binomial sweep needs --ps")
            table = I.best_binomial(ps, args.m_max, eps_trunc=args.eps_trunc)
        else:
            rs = _float_list(args.rs or "")
            if not rs:
                raise InputError("negbinomial sweep needs --rs")
            grid = None
            if args.m_max is not None:
                n = len(rs)
                grid = [n + args.step * k for k in range(int((args.m_max - n) / args.step + 1e-9) + 1)]
            table = I.best_negbinomial(rs, grid=grid, eps_trunc=args.eps_trunc)
    except P.DomainError as e:
        raise InputError(str(e)) from e
    if args.format == "json":
        _write(args.out, _dumps(table.to_dict()) + "\n")
    else:
        _write(args.out, table.to_csv())
    return EXIT_FALSE if table.status == I.VIOLATED else EXIT_OK


def _save_instance(out_dir: Path, rec: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    name = f"{rec['suite']}-{rec['instance']:05d}.json"
    (out_dir / name).write_text(_dumps(rec) + "\n")


def _csv_row(rec: dict) -> str:
    v = rec.get("verdict") or {}
    margin = v.get("margin")
    err = None
    if v.get("lhs") and v.get("rhs"):
        err = v["lhs"]["error_bound"] + v["rhs"]["error_bound"]
    cells = [rec["suite"], str(rec["instance"]), rec["status"],
             "" if margin is None else repr(margin), "" if err is None else repr(err)]
    return ",".join(cells)


def cmd_verify(args) -> int:
    cfg = RunConfig(seed=args.seed, eps_trunc=args.eps_trunc,
                    tolerances={"mean": args.tol_mean, "lc": args.tol_lc},
                    instances=args.instances, draws=args.draws, strict=args.strict)
    out_dir = Path(args.out_dir) if args.out_dir else None
    records = []
    lines = []
    if args.format == "csv":
        lines.append("# lcorder verify, schema v1")
        lines.append("suite,instance,status,margin,error")
    for rec in run_suite(args.suite, cfg, args.only):
        records.append(rec)
        lines.append(_csv_row(rec) if args.format == "csv" else _dumps(rec))
        if out_dir is not None:
            if rec["status"] == I.VIOLATED:
                _save_instance(out_dir, rec)
            for k, found in enumerate(rec.get("found", [])):
                out_dir.mkdir(parents=True, exist_ok=True)
                path = out_dir / f"counterexample-{rec['instance']:05d}-{k:03d}.json"
                path.write_text(_dumps(found) + "\n")
    counts = summarize(records)
    ok = passed(counts, args.strict)
    summary = {"suite": args.suite, "seed": args.seed, "records": len(records),
               "counts": counts, "passed": ok}
    if args.format == "csv":
        lines.append("# summary " + _dumps(summary))
    else:
        lines.append(_dumps({"summary": summary}))
    _write(args.out, "\n".join(lines) + "\n")
    if args.suite == "open-problem-fuzz":
        return EXIT_OK
    return EXIT_OK if ok else EXIT_FALSE


def cmd_replay(args) -> int:
    """Re-check a counterexample file written by the fuzz suite."""
    obj = load_spec(args.file)
    try:
        f, fp = P.from_json(obj["f"]), P.from_json(obj["f_prime"])
        g, gp = P.from_json(obj["g"]), P.from_json(obj["g_prime"])
    except (KeyError, TypeError, P.DomainError) as e:
        raise InputError(f"not a counterexample file: {e}") from e
    hyp = lc_le(f, fp, args.tol_lc).verdict and lc_le(g, gp, args.tol_lc).verdict
    rep = lc_le(P.convolve(f, g), P.convolve(fp, gp), args.tol_lc)
    print(_dumps({"hypotheses": hyp, "report": rep.to_dict()}))
    return EXIT_OK if rep.verdict else EXIT_FALSE


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return x


def _eps(text: str) -> float:
    x = _positive_float(text)
    if x > 1e-6:
        raise argparse.ArgumentTypeError("--eps-trunc must be at most 1e-6")
    return x


def _default_seed() -> int:
    env = os.environ.get("LCORDER_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps-trunc", type=_eps, default=P.DEFAULT_EPS_TRUNC,
                        help="tail mass budget for infinite families (default 1e-12)")
    common.add_argument("--tol-lc", type=_positive_float, default=LC_TOL,
                        help="concavity slack of the order check")
    common.add_argument("--tol-mean", type=_positive_float, default=I.EQUAL_MEAN_TOL,
                        help="equal-mean tolerance gating the inequalities")
    common.add_argument("--out", default="-", help="output file (default stdout)")

    ap = argparse.ArgumentParser(prog="lcorder",
                                 description="Relative log-concavity order and entropy inequalities")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="build a distribution from a JSON spec")
    p.add_argument("spec", help="JSON spec: inline, '-' for stdin, or a path")
    p.add_argument("--window", type=_positive_float, default=C.DEFAULT_WINDOW,
                   help="tail window for densities")
    p.add_argument("--nodes", type=int, default=C.DEFAULT_NODES, help="grid size for densities")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("order", parents=[common], help="decide f <=_lc g")
    p.add_argument("f")
    p.add_argument("g")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("div", parents=[common], help="entropy, relative entropy or total variation")
    p.add_argument("f")
    p.add_argument("g", nargs="?")
    p.add_argument("--measure", choices=("kl", "tv", "entropy"), default="kl")
    p.set_defaults(func=cmd_div)

    p = sub.add_parser("approx", parents=[common], help="best binomial / negative binomial sweep")
    p.add_argument("kind", choices=("binomial", "negbinomial"))
    p.add_argument("--ps", help="comma-separated Bernoulli probabilities")
    p.add_argument("--rs", help="comma-separated geometric parameters")
    p.add_argument("--m-max", type=float, default=None, help="largest m (default 4n)")
    p.add_argument("--step", type=_positive_float, default=0.5, help="m step for negbinomial")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help="suite seed (default $LCORDER_SEED or 0)")
    p.add_argument("--instances", type=int, default=None, help="instance count override")
    p.add_argument("--only", type=int, default=None, help="run a single instance index")
    p.add_argument("--draws", type=int, default=200, help="samples per maxent / I-projection instance")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--strict", action="store_true", help="treat inconclusive verdicts as failures")
    p.add_argument("--out-dir", default=None,
                   help="directory for violated instances and fuzz counterexamples")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", parents=[common], help="re-check a saved counterexample")
    p.add_argument("file")
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "m_max", None) is not None and args.command == "approx" and args.kind == "binomial":
        args.m_max = int(args.m_max)
    try:
        return args.func(args)
    except InputError as e:
        sys.stderr.write(f"lcorder: error: {e}\n")
        return EXIT_USAGE
    except P.DomainError as e:
        sys.stderr.write(f"lcorder: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
