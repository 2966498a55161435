"""Command-line interface: ``freehol <command> ...``.

Numeric commands print CSV rows ``quantity,value,lower,upper,flags``;
``diff`` and ``gen`` write JSON; ``verify`` writes a verdict report.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .calculus import (
    OperatorTuple,
    boundary_norm,
    evaluate,
    evaluate_polynomial,
    hinf_norm,
    hp_norm,
    joint_spectral_radius,
    metric_rho,
    row_norm,
)
from .certify import boundary_norm_bounds
from .derivations import partial_k
from .fock import TruncatedFock, assemble, default_level
from .io import dumps_series, read_series, read_tuple, tuple_to_dict, write_series
from .transforms import (
    cauchy_kernel,
    cauchy_transform,
    herglotz_check,
    pluriharmonic_re,
    poisson_defect_bound,
    poisson_kernel,
    poisson_transform,
)

OUT_HEADER = ("quantity", "value", "lower", "upper", "flags")


class _Out:
    def __init__(self, stream):
        self.w = csv.writer(stream, lineterminator="\n")
        self.w.writerow(OUT_HEADER)

    def row(self, quantity, value, lower=None, upper=None, flags=()):
        fmt = lambda x: "" if x is None else repr(float(x))
        self.w.writerow([quantity, fmt(value), fmt(lower), fmt(upper), ";".join(flags)])


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _check_level(N: int | None, args) -> None:
    if N is not None and N > harness.CAPS["N"] and not args.unsafe_sizes:
        raise harness.SizeCapError(f"fock level {N} exceeds cap {harness.CAPS['N']}; use --unsafe-sizes")


def _space(F, args, default=None) -> TruncatedFock:
    N = args.fock_level
    _check_level(N, args)
    if N is None:
        N = default if default is not None else default_level(F.n, F.degree, F.q)
    return TruncatedFock(F.n, N)


def _tuple(path) -> OperatorTuple:
    return OperatorTuple(read_tuple(path))


def cmd_eval(args, out: _Out):
    F, T = read_series(args.series), _tuple(args.tuple)
    ev = evaluate(F, T)
    norm = float(np.linalg.norm(ev.value, 2))
    tb = ev.tail_bound
    lo = None if tb is None else max(norm - tb, 0.0)
    hi = None if tb is None else norm + tb
    out.row("value_norm", norm, lo, hi, ev.flags)
    out.row("tail_bound", math.inf if tb is None else tb, flags=("unknown",) if tb is None else ())
    if args.matrix_out:
        Path(args.matrix_out).write_text(json.dumps({"re": ev.value.real.tolist(), "im": ev.value.imag.tolist()}) + "\n")


def cmd_jsr(args, out: _Out):
    T = _tuple(args.tuple)
    sd = joint_spectral_radius(T, args.depth)
    out.row("row_norm", row_norm(T))
    for k, g in enumerate(sd.gelfand, start=1):
        out.row(f"gelfand_k={k}", g)
    out.row("joint_spectral_radius", sd.estimate, None, sd.bound, ("estimate_is_g_K", "upper_is_min_g_k"))


def cmd_hinf(args, out: _Out):
    F = read_series(args.series)
    rep = hinf_norm(F, _floats(args.grid), _space(F, args))
    for r, v in zip(rep.grid, rep.per_r):
        out.row(f"boundary_norm_r={r:g}", v, flags=("truncated_model",))
    out.row("hinf_norm", rep.sup, rep.lower, rep.upper, (rep.method,) + rep.flags)
    out.row("r_to_one_gap", rep.gap)


def cmd_hp(args, out: _Out):
    F = read_series(args.series)
    space = _space(F, args, default=min(F.degree + 2, default_level(F.n, F.degree, F.q)))
    rep = hp_norm(F, args.p, args.cells, space, method=args.method)
    out.row(f"hp_norm_p={args.p:g}", (rep.lower + rep.upper) / 2, rep.lower, rep.upper, ("truncated_model",) + rep.flags)
    out.row(f"hp_norm_certified_p={args.p:g}", rep.certified_upper, rep.lower, rep.certified_upper)


def cmd_rho(args, out: _Out):
    F, G = read_series(args.a), read_series(args.b)
    space = None
    if args.fock_level is not None:
        _check_level(args.fock_level, args)
        space = TruncatedFock(F.n, args.fock_level)
    rep = metric_rho(F, G, args.terms, space)
    out.row("rho", rep.value, rep.value, rep.value + rep.truncation_error)


def cmd_norm(args, out: _Out):
    F = read_series(args.series)
    space = _space(F, args)
    model = boundary_norm(F.with_tail(None), args.r, space)
    bracket = boundary_norm_bounds(F.with_tail(None), args.r)
    flags = ["truncated_model", bracket.method]
    lo, hi = max(model, bracket.lower), bracket.upper
    if F.tail:
        err = F.tail.sum_bound(F.degree + 1, args.r)
        out.row("tail_error_bar", err)
        lo, hi = max(lo - err, 0.0), hi + err
        flags.append("tail")
    out.row(f"boundary_norm_r={args.r:g}", model, lo, hi, flags)


def cmd_diff(args, out_stream):
    F = read_series(args.series)
    D = partial_k(F, _ints(args.wrt))
    if args.out:
        write_series(D, args.out)
    else:
        out_stream.write(dumps_series(D) + "\n")


def cmd_cauchy(args, out: _Out):
    F, T = read_series(args.series), _tuple(args.tuple)
    space = _space(F, args, default=F.degree + 1)
    direct = evaluate(F, T).value
    via = cauchy_transform(T, assemble(F.with_tail(None), space))
    flags = ("tail_ignored",) if F.tail else ()
    out.row("calculus_minus_cauchy_transform", float(np.max(np.abs(direct - via))), flags=flags)
    C = cauchy_kernel(T, space)
    t = row_norm(T)
    out.row("cauchy_kernel_norm", C.norm(), None, 1 / (1 - t) if t < 1 else math.inf)
    out.row("neumann_sum_defect", C.neumann_defect)


def cmd_poisson(args, out: _Out):
    F, T = read_series(args.series), _tuple(args.tuple)
    p = F.with_tail(None)
    space = _space(F, args, default=F.degree + 2)
    K = poisson_kernel(T, space)
    out.row("kernel_gram_error", float(np.max(np.abs(K.gram() - K.expected_gram()))))
    pT = evaluate_polynomial(p, T)
    err = float(np.linalg.norm(poisson_transform(T, assemble(p, space), K) - pT, 2))
    out.row("reproduction_error", err, None, poisson_defect_bound(T, p, space.N))


def cmd_herglotz(args, out: _Out):
    F = read_series(args.series)
    u = pluriharmonic_re(F)
    space = None if args.fock_level is None else _space(F, args)
    rep = herglotz_check(u, _floats(args.grid), space)
    for r, e in zip(rep.grid, rep.min_eigs):
        out.row(f"real_part_min_eig_r={r:g}", e, flags=("positive",) if e >= -1e-9 else ("negative",))


def cmd_gen(args, out_stream):
    if args.kind == "series":
        F = harness.gen_series(args.seed, args.n, args.degree, args.profile, t=args.t)
        text = dumps_series(F)
    else:
        T = harness.gen_row_contraction(args.seed, args.n, args.d, args.norm)
        text = json.dumps(tuple_to_dict(T.mats), sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        out_stream.write(text + "\n")


def cmd_verify(args, out_stream) -> int:
    cfg_dict = json.loads(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    if args.unsafe_sizes:
        cfg_dict["unsafe_sizes"] = True
    if args.suite:
        cfg_dict["suites"] = list(args.suite)
    cfg = harness.SuiteConfig.from_dict(cfg_dict)
    rows = harness.run_suite(cfg)
    text = harness.rows_to_csv(rows, timestamp=not args.no_timestamp)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out_stream.write(text)
    return 0 if harness.all_passed(rows) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freehol", description="free holomorphic functions at desk scale")
    ap.add_argument("--unsafe-sizes", action="store_true", help="lift the default size caps")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_, *opts):
        p = sub.add_parser(name, help=help_)
        for o in opts:
            o(p)
        return p

    series = lambda p: p.add_argument("--series", required=True)
    tup = lambda p: p.add_argument("--tuple", required=True)
    level = lambda p: p.add_argument("--fock-level", type=int, default=None)

    p = add("eval", "evaluate a series at a tuple", series, tup)
    p.add_argument("--matrix-out", help="write the value as JSON {re, im}")
    p = add("jsr", "Gelfand sequence of a tuple", tup)
    p.add_argument("--depth", type=int, default=24)
    p = add("hinf", "boundary norms over a radius grid", series, level)
    p.add_argument("--grid", default="0.5,0.9,0.99")
    p = add("hp", "radial maximal Hardy norm", series, level)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--cells", type=int, default=1000)
    p.add_argument("--method", choices=("log_convex", "riemann"), default="log_convex")
    p = add("rho", "metric between two series", level)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--terms", type=int, default=20)
    p = add("norm", "boundary norm at one radius", series, level)
    p.add_argument("--r", type=float, default=1.0)
    p = add("diff", "free partial derivative", series)
    p.add_argument("--wrt", required=True, help="comma-separated letters, outermost first")
    p.add_argument("--out")
    add("cauchy", "functional calculus against the Cauchy transform", series, tup, level)
    add("poisson", "Poisson kernel and transform checks", series, tup, level)
    p = add("herglotz", "positivity of the real part over a radius grid", series, level)
    p.add_argument("--grid", default="0.5,0.9,0.99,1.0")
    p = add("gen", "random series or tuple")
    p.add_argument("kind", choices=("series", "tuple"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--profile", choices=("polynomial", "geometric"), default="polynomial")
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--norm", type=float, default=0.9)
    p.add_argument("--out")
    p = add("verify", "run verification suites")
    p.add_argument("--config")
    p.add_argument("--suite", action="append", help="suite name (repeatable)")
    p.add_argument("--out")
    p.add_argument("--no-timestamp", action="store_true")
    return ap


TABLE = {
    "eval": cmd_eval, "jsr": cmd_jsr, "hinf": cmd_hinf, "hp": cmd_hp, "rho": cmd_rho,
    "norm": cmd_norm, "cauchy": cmd_cauchy, "poisson": cmd_poisson, "herglotz": cmd_herglotz,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args, sys.stdout)
        if args.command == "diff":
            cmd_diff(args, sys.stdout)
            return 0
        if args.command == "gen":
            cmd_gen(args, sys.stdout)
            return 0
        buf = io.StringIO()
        TABLE[args.command](args, _Out(buf))
        sys.stdout.write(buf.getvalue())
        return 0
    except (ValueError, KeyError, OSError, OverflowError) as exc:
        print(f"freehol {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
