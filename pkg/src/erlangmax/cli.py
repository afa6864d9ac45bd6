"""Command-line front end.

    erlangmax exact    --beta 1 --k 4 --omega 10
    erlangmax sweep    --beta 1 --omega-grid 1e2:1e4:log3 --k-list 1,4,16
    erlangmax verify   [--quick]
    erlangmax simulate --beta 1 --k 4 --omega 10 --paths 1000000 --seed 1

Tables go to standard output as CSV (header always present) or, with
``--format json``, as a JSON array of objects.  Exit status is 0 on success,
1 on a failed check or simulation, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import checks, mc
from .asym import discretization_constant, expected_max_asym
from .errors import ErlangMaxError, TruncationExcess
from .exact import expected_max
from .params import SamplingParams, derive

ROW_FIELDS = (
    "beta",
    "omega",
    "k",
    "rho",
    "exact",
    "asym",
    "mc_mean",
    "mc_stderr",
    "sampling_error",
    "D_k",
)
SIM_FIELDS = (
    "beta",
    "omega",
    "k",
    "rho",
    "mean",
    "stderr",
    "paths",
    "bias_bound",
    "truncated_paths",
    "exact",
    "z",
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing


def parse_grid(text: str) -> list[float]:
    """``lo:hi:logN``, ``lo:hi:linN`` or a comma list of numbers."""
    try:
        if ":" in text:
            lo_s, hi_s, kind = text.split(":")
            lo, hi = float(lo_s), float(hi_s)
            if kind.startswith("log"):
                n, log = int(kind[3:]), True
            elif kind.startswith("lin"):
                n, log = int(kind[3:]), False
            else:
                raise ValueError
            if n < 1:
                raise ValueError
            if n == 1:
                return [lo]
            if log:
                if lo <= 0 or hi <= 0:
                    raise ValueError
                vals = np.logspace(math.log10(lo), math.log10(hi), n)
                vals[0], vals[-1] = lo, hi
            else:
                vals = np.linspace(lo, hi, n)
            return [float(v) for v in vals]
        vals = [float(v) for v in text.split(",") if v.strip()]
        if not vals:
            raise ValueError
        return vals
    except ValueError:
        raise UsageError(f"malformed grid {text!r}; use lo:hi:logN, lo:hi:linN or a,b,c") from None


def parse_k_list(text: str) -> list[int]:
    try:
        ks = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"malformed k list {text!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise UsageError(f"k values must be integers >= 1, got {text!r}")
    return ks


# ---------------------------------------------------------------- output


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def render_csv(rows: list[dict], fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([fmt(row.get(f)) for f in fields])
    return buf.getvalue()


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, float) and not math.isfinite(value):
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    return fmt(value)


def render_json(rows: list[dict], fields) -> str:
    objs = [
        "{" + ", ".join(f"{json.dumps(f)}: {_json_value(row.get(f))}" for f in fields) + "}"
        for row in rows
    ]
    return "[" + ",\n ".join(objs) + "]\n"


def emit(rows: list[dict], fields, args) -> None:
    text = render_json(rows, fields) if args.format == "json" else render_csv(rows, fields)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- rows


def _row_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def output_row(params: SamplingParams, mc_cfg: mc.McConfig | None = None) -> dict:
    d = derive(params)
    ex = expected_max(params)
    row = {
        "beta": params.beta,
        "omega": params.omega,
        "k": params.k,
        "rho": d.rho,
        "exact": ex,
        "asym": expected_max_asym(params),
        "mc_mean": None,
        "mc_stderr": None,
        "sampling_error": 0.5 / params.beta - ex,
        "D_k": discretization_constant(params.k).value,
    }
    if mc_cfg is not None:
        est = mc.estimate_max(params, mc_cfg)
        row["mc_mean"], row["mc_stderr"] = est.mean, est.stderr
    return row


def _params(beta, k, omega=None, rho=None) -> SamplingParams:
    try:
        if rho is not None:
            return SamplingParams.from_rho(rho, k, beta)
        return SamplingParams(beta, omega, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _mc_config(args, index: int) -> mc.McConfig | None:
    if not args.with_mc:
        return None
    return mc.McConfig(paths=args.paths, seed=_row_seed(args.seed, index))


# ---------------------------------------------------------------- commands


def cmd_exact(args) -> int:
    p = _params(args.beta, args.k, args.omega, args.rho)
    emit([output_row(p, _mc_config(args, 0))], ROW_FIELDS, args)
    return 0


def cmd_sweep(args) -> int:
    ks = parse_k_list(args.k_list)
    if args.omega_grid is not None:
        pts = [_params(args.beta, k, omega=w) for w in parse_grid(args.omega_grid) for k in ks]
    else:
        pts = [_params(args.beta, k, rho=r) for r in parse_grid(args.rho_grid) for k in ks]
    pts.sort(key=lambda p: (p.omega, p.k))
    rows = [output_row(p, _mc_config(args, i)) for i, p in enumerate(pts)]
    emit(rows, ROW_FIELDS, args)
    return 0


def cmd_verify(args) -> int:
    results = checks.run_all(quick=args.quick, fault=args.inject_fault, seed=args.seed)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    failed = [r for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(lines[-1])
    else:
        sys.stdout.write(text)
    return 1 if failed else 0


def cmd_simulate(args) -> int:
    p = _params(args.beta, args.k, args.omega, args.rho)
    try:
        cfg = mc.McConfig(
            paths=args.paths, seed=args.seed, margin_eps=args.margin_eps, max_steps=args.max_steps
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        est = mc.estimate_max(p, cfg)
    except TruncationExcess as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ex = expected_max(p)
    z = (ex - est.mean) / est.stderr if est.stderr > 0 else float("nan")
    row = {
        "beta": p.beta,
        "omega": p.omega,
        "k": p.k,
        "rho": derive(p).rho,
        "mean": est.mean,
        "stderr": est.stderr,
        "paths": est.paths,
        "bias_bound": est.bias_bound,
        "truncated_paths": est.truncated_paths,
        "exact": ex,
        "z": z,
    }
    emit([row], SIM_FIELDS, args)
    return 0


# ---------------------------------------------------------------- parser


def _point_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--beta", type=float, required=True, help="drift magnitude")
    sp.add_argument("--k", type=int, required=True, help="Erlang phase count")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--omega", type=float, help="sampling frequency")
    g.add_argument("--rho", type=float, help="load coordinate in (0, 1) instead of omega")


def _output_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", help="write the table here; stdout gets a summary line")


def _mc_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--with-mc", action="store_true", help="add Monte Carlo columns")
    sp.add_argument("--paths", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erlangmax",
        description="Expected maximum of drifted Brownian motion under Erlang sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("exact", help="exact and asymptotic expected maximum at one point")
    _point_flags(sp)
    _mc_flags(sp)
    _output_flags(sp)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("sweep", help="table over an omega or rho grid and a list of k")
    sp.add_argument("--beta", type=float, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--omega-grid", help="lo:hi:logN, lo:hi:linN or a,b,c")
    g.add_argument("--rho-grid", help="same syntax, values in (0, 1)")
    sp.add_argument("--k-list", required=True, help="comma-separated k values")
    _mc_flags(sp)
    _output_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("--quick", action="store_true", help="reduced grids")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="write the report here; stdout gets a summary line")
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate against the exact value")
    _point_flags(sp)
    sp.add_argument("--paths", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--margin-eps", type=float, default=1e-9)
    sp.add_argument("--max-steps", type=int, default=10_000_000)
    _output_flags(sp)
    sp.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ErlangMaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
