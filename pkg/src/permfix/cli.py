"""Command-line interface: ``permfix <subcommand> [options]``.

Data goes to stdout as CSV (header row first) or JSON; diagnostics and
error objects go to stderr. Exit status: 0 ok, 1 oracle mismatch,
2 usage, 3 cap exceeded, 4 domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from fractions import Fraction

from permfix import blocksys, fixedsets, lsets, permcore, primaction
from permfix.config import load_config
from permfix.errors import DomainError, PermfixError
from permfix.serialize import float_str, frac_str


class UsageError(PermfixError):
    exit_code = 2
    kind = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument parsing helpers ------------------------------------------------


def parse_int_list(text: str) -> list:
    """``"2,3,5"``, ``"2..5"`` or ``"8..40:2"`` (inclusive ranges, optional step)."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)(?::(\d+))?", chunk)
        if m:
            lo, hi, step = int(m[1]), int(m[2]), int(m[3] or 1)
            if step < 1:
                raise UsageError("range step must be positive")
            out.extend(range(lo, hi + 1, step))
        else:
            try:
                out.append(int(chunk))
            except ValueError:
                raise UsageError(f"not an integer list: {text!r}") from None
    return out


def parse_perm(text: str, n: int | None = None) -> permcore.Permutation:
    """Cycle notation ``"(1 2)(3 4 5)"`` (needs ``n`` if points are omitted) or one-line ``"2,1,3"``."""
    text = text.strip()
    if text.startswith("("):
        cycles = [
            [int(x) for x in re.split(r"[\s,]+", body.strip()) if x]
            for body in re.findall(r"\(([^)]*)\)", text)
        ]
        top = max((x for c in cycles for x in c), default=1)
        return permcore.Permutation.from_cycles(n or top, [c for c in cycles if c])
    perm = permcore.Permutation(tuple(parse_int_list(text)))
    if n is not None and perm.n != n:
        raise DomainError(f"permutation has degree {perm.n}, expected {n}")
    return perm


def _cell(value):
    if isinstance(value, Fraction):
        return frac_str(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return float_str(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(_cell(v)) for v in value)
    return value


def _json_cell(value):
    if isinstance(value, Fraction):
        return frac_str(value)
    if isinstance(value, float):
        return float(float_str(value))
    if isinstance(value, (list, tuple)):
        return [_json_cell(v) for v in value]
    return value


def emit(rows: list, header: list, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        payload = [{h: _json_cell(v) for h, v in zip(header, row)} for row in rows]
        out.write(json.dumps(payload) + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    out.write(buf.getvalue())


# -- subcommands -------------------------------------------------------------


def _kd(args) -> fixedsets.KDVectors:
    k = parse_int_list(args.k)
    d = parse_int_list(args.d) if args.d else [1] * len(k)
    kd = fixedsets.KDVectors(tuple(k), tuple(d))
    if args.n is not None and args.n != kd.n:
        raise DomainError(f"sum of k is {kd.n}, not n={args.n}")
    return kd


def cmd_exact_i(args, cfg):
    kd = _kd(args)
    p = fixedsets.exact_i(kd, cfg.enumeration_cap, cfg.threads)
    return ["n", "k", "d", "p", "crude_bound"], [[kd.n, kd.k, kd.d, p, fixedsets.crude_bound(kd)]]


def cmd_exact_I(args, cfg):
    rows = []
    for nu in parse_int_list(args.nu):
        q = blocksys.BlockSystemQuery(args.n, nu)
        exact = blocksys.exact_I(q, cfg.enumeration_cap, cfg.threads)
        order = blocksys.theory_I_order(q)
        rows.append([args.n, nu, exact, order, float(exact) / order])
    return ["n", "nu", "exact", "theory_order", "ratio"], rows


def cmd_mc_i(args, cfg):
    kd = _kd(args)
    est, se = fixedsets.mc_i(kd, cfg.trials, permcore.make_rng(cfg.seed))
    return ["n", "k", "d", "estimate", "stderr", "trials"], [[kd.n, kd.k, kd.d, est, se, cfg.trials]]


def cmd_mc_I(args, cfg):
    q = blocksys.BlockSystemQuery(args.n, args.nu)
    est, se = blocksys.mc_I(q, cfg.trials, permcore.make_rng(cfg.seed))
    order = blocksys.theory_I_order(q)
    return (
        ["n", "nu", "estimate", "stderr", "trials", "theory_order", "ratio"],
        [[q.n, q.nu, est, se, cfg.trials, order, est / order]],
    )


def cmd_lset(args, cfg):
    m = args.m
    if args.star:
        ts = lsets.lset_star(parse_int_list(args.c), m)
    else:
        ts = lsets.lset(parse_int_list(args.c), m, cfg.tuple_budget)
    if cfg.output_format == "json" and not args.size_only:
        sys.stdout.write(ts.to_json() + "\n")
        return None
    if args.size_only:
        return ["m", "total", "size"], [[ts.m, ts.total, ts.size]]
    return ["m", "total", "tuple"], [[ts.m, ts.total, t] for t in sorted(ts.tuples)]


def cmd_gbound(args, cfg):
    a = parse_int_list(args.a)
    rows = [[a, args.m, lsets.g_bound(a, args.m), lsets.lset_star(a, args.m).size]]
    return ["a", "m", "g_bound", "lset_star_size"], rows


def cmd_fdiv(args, cfg):
    ns = parse_int_list(args.n)
    rows = []
    for n in ns:
        f = fixedsets.f_divisible(n, args.d)
        p = Fraction(f, math.factorial(n))
        bound = n ** (-1 + 1 / args.d) if n else 1.0
        rows.append([n, args.d, f, p, bound])
    return ["n", "d", "count", "p", "upper_bound"], rows


def cmd_delta(args, cfg):
    rows = [[m, blocksys.delta(m), blocksys.delta_integral(m)] for m in parse_int_list(args.m)]
    return ["m", "delta", "integral"], rows


def cmd_dominant(args, cfg):
    rows = []
    for nu in parse_int_list(args.nu):
        rep = blocksys.dominant_partition(nu)
        if args.candidates:
            for part, expo in rep.candidates:
                rows.append([nu, "(" + ",".join(map(str, part)) + ")", expo, part == rep.dominant])
        else:
            dom = "ambiguous" if rep.dominant is None else "(" + ",".join(map(str, rep.dominant)) + ")"
            expo = min(e for _, e in rep.candidates)
            rows.append([nu, dom, expo, rep.margin])
    if args.candidates:
        return ["nu", "partition", "exponent", "dominant"], rows
    return ["nu", "dominant", "exponent", "margin"], rows


def cmd_gf_bound(args, cfg):
    if args.cm is not None:
        coeffs = blocksys.coeff_exp_inv_square(args.cm)
        return ["m", "c_m", "m2_c_m"], [[m, c, m * m * c] for m, c in enumerate(coeffs)]
    q = blocksys.BlockSystemQuery(args.n, args.nu)
    b = blocksys.largenu_bound(q)
    rows = [[q.n, q.nu, b.s, b.f_coeff, b.g_coeff, b.dominated]]
    header = ["n", "nu", "s", "f_coeff", "g_coeff", "f_le_g"]
    if args.with_exact:
        exact = blocksys.exact_I(q, cfg.enumeration_cap, cfg.threads)
        rows[0].append(exact)
        header.append("exact_I")
    return header, rows


def cmd_sieve_count(args, cfg):
    c = parse_int_list(args.c)
    count = permcore.count_prescribed_small_cycles(args.n, c, args.k)
    return ["n", "k", "c", "count"], [[args.n, args.k, c, count]]


def cmd_kset_cycles(args, cfg):
    p = parse_perm(args.perm, args.m)
    return ["m", "k", "perm", "cycles"], [[p.n, args.k, str(p), primaction.kset_cycle_count(p, args.k)]]


def _wreath_element(args) -> primaction.WreathElement:
    base = [parse_perm(t, args.m) for t in args.base.split(";")]
    top = parse_perm(args.top, len(base))
    return primaction.WreathElement(tuple(base), top)


def cmd_wreath(args, cfg):
    if args.base:
        g = _wreath_element(args)
        row = [g.m, g.r, args.k, primaction.wreath_fixed_points(g, args.k) if args.k else None]
        row.append(primaction.wreath_cycle_count(g))
        return ["m", "r", "k", "fixed_points", "cycles"], [row]
    first, second = primaction.product_action_degree_forms(args.m, args.k, args.r)
    row = [args.m, args.k, args.r, first, second]
    header = ["m", "k", "r", "min_degree", "closed_form"]
    if args.exhaustive:
        row.append(primaction.exhaustive_minimal_degree(args.m, args.k, args.r))
        header.append("exhaustive")
    return header, [row]


def cmd_min_degree(args, cfg):
    if args.perm:
        p = parse_perm(args.perm, args.n)
        return ["n", "perm", "min_degree"], [[p.n, str(p), primaction.minimal_degree_cyclic(p)]]
    if args.n is None or args.alpha is None:
        raise UsageError("give --perm, or --n with --alpha")
    est, se = primaction.mc_minimal_degree(args.n, args.alpha, cfg.trials, permcore.make_rng(cfg.seed))
    return ["n", "alpha", "estimate", "stderr", "trials"], [[args.n, args.alpha, est, se, cfg.trials]]


def cmd_local_global(args, cfg):
    rows = fixedsets.local_global_report(
        parse_int_list(args.n), cfg.trials, permcore.make_rng(cfg.seed), cfg.enumeration_cap, cfg.tuple_budget
    )
    return (
        ["n", "k", "exact", "lset_mean", "lset_stderr", "heuristic", "ratio"],
        [[r.n, r.k, r.exact, r.lset_mean, r.lset_stderr, r.heuristic, r.ratio] for r in rows],
    )


def cmd_oracle_suite(args, cfg):
    rows = []
    for n in range(1, args.n_max + 1):
        for kd in fixedsets.iter_kd_vectors(n, args.m_max):
            a, b = fixedsets.exact_i(kd), fixedsets.brute_force_i(kd)
            rows.append(["i", n, kd.k, kd.d, a, b, a == b])
        for nu in range(2, n):
            if n % nu == 0:
                q = blocksys.BlockSystemQuery(n, nu)
                a, b = blocksys.exact_I(q), blocksys.brute_force_I(q)
                rows.append(["I", n, [nu], [], a, b, a == b])
    return ["kind", "n", "k_or_nu", "d", "exact", "brute_force", "match"], rows


COMMANDS = {
    "exact-i": (cmd_exact_i, "exact proportion of S_n with disjoint invariant sets of sizes k_i whose cycles are divisible by d_i"),
    "exact-I": (cmd_exact_I, "exact proportion of S_n preserving a system of nu blocks of size n/nu, with the theory order"),
    "mc-i": (cmd_mc_i, "Monte Carlo estimate of the divisible fixed-set proportion i(n,k,d)"),
    "mc-I": (cmd_mc_I, "Monte Carlo estimate of the block-system proportion I(n,nu)"),
    "lset": (cmd_lset, "the set L_m(c) of class totals reachable by splitting cycle counts c among m classes"),
    "gbound": (cmd_gbound, "the order-statistics bound G(a) = min_j (1 + a~_1..a~_j)^(m-1) m^(r-j) next to |L*_m(a)|"),
    "fdiv": (cmd_fdiv, "f_d(n), permutations with all cycle lengths divisible by d, against n^(-1+1/d)"),
    "delta": (cmd_delta, "the exponent delta_m, closed form and quadrature of int_1^{(m-1)/log m} log t dt"),
    "dominant": (cmd_dominant, "dominant partition of nu: (1,..,1) for nu <= 4, (nu-1,1) for nu >= 5"),
    "gf-bound": (cmd_gf_bound, "coefficient of z^nu in f(z) and its majorant g(z); --cm lists exp(sum z^k/k^2)"),
    "sieve-count": (cmd_sieve_count, "exact count of permutations of S_n with exactly c_i i-cycles for i <= k"),
    "kset-cycles": (cmd_kset_cycles, "number of cycles of a permutation acting on k-subsets"),
    "wreath": (cmd_wreath, "S_m wr S_r in product action: fixed points, cycles, and minimal degree on r-tuples of k-sets"),
    "min-degree": (cmd_min_degree, "minimal degree of the cyclic group <pi>, or the Monte Carlo probability it is >= n^alpha"),
    "local-global": (cmd_local_global, "i(n,(n/2,n/2)) against E|L_2(X_{n/2})|/(n/2) under Poisson cycle counts"),
    "oracle-suite": (cmd_oracle_suite, "exact enumeration against brute force over S_n for i(n,k,d) and I(n,nu)"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=["csv", "json"])
    common.add_argument("--seed", type=int, help="root seed (env PERMFIX_SEED)")
    common.add_argument("--trials", type=int)
    common.add_argument("--enumeration-cap", type=int)
    common.add_argument("--tuple-budget", type=int)
    common.add_argument("--threads", type=int, help="worker processes for exact enumeration")
    common.add_argument("--config", help="file of key = value lines")

    parser = _Parser(prog="permfix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name):
        return sub.add_parser(name, parents=[common], help=COMMANDS[name][1], description=COMMANDS[name][1])

    for name in ("exact-i", "mc-i"):
        p = add(name)
        p.add_argument("--n", type=int)
        p.add_argument("--k", required=True, help="comma-separated part sizes")
        p.add_argument("--d", help="comma-separated divisors (default all 1)")
    p = add("exact-I")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nu", required=True, help="one divisor or a list")
    p = add("mc-I")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nu", type=int, required=True)
    p = add("lset")
    p.add_argument("--c", required=True, help="cycle counts c_1,..,c_k (or lengths with --star)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--star", action="store_true", help="treat --c as a list of lengths a_1..a_r")
    p.add_argument("--size-only", action="store_true")
    p = add("gbound")
    p.add_argument("--a", required=True)
    p.add_argument("--m", type=int, required=True)
    p = add("fdiv")
    p.add_argument("--n", required=True, help="n or a range like 2..20:2")
    p.add_argument("--d", type=int, required=True)
    p = add("delta")
    p.add_argument("--m", required=True, help="m or a range like 2..5")
    p = add("dominant")
    p.add_argument("--nu", required=True)
    p.add_argument("--candidates", action="store_true")
    p = add("gf-bound")
    p.add_argument("--n", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--with-exact", action="store_true")
    p.add_argument("--cm", type=int, help="emit c_0..c_M instead")
    p = add("sieve-count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c", required=True)
    p = add("kset-cycles")
    p.add_argument("--perm", required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int, required=True)
    p = add("wreath")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--base", help="semicolon-separated base permutations")
    p.add_argument("--top", help="top permutation")
    p.add_argument("--exhaustive", action="store_true")
    p = add("min-degree")
    p.add_argument("--perm")
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p = add("local-global")
    p.add_argument("--n", required=True, help="even n values, e.g. 8..40:2")
    p = add("oracle-suite")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--m-max", type=int, default=3)
    return parser


def _validate(args):
    if args.command == "gf-bound" and args.cm is None and (args.n is None or args.nu is None):
        raise UsageError("gf-bound needs --n and --nu, or --cm")
    if args.command == "wreath":
        if args.base and not args.top:
            raise UsageError("--base needs --top")
        if not args.base and (args.k is None or args.r is None):
            raise UsageError("wreath needs --k and --r, or --base/--top")


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        cfg = load_config(
            args.config,
            seed=args.seed,
            trials=args.trials,
            enumeration_cap=args.enumeration_cap,
            tuple_budget=args.tuple_budget,
            output_format=args.output_format,
            threads=args.threads if args.threads is not None else (os.cpu_count() or 1),
        )
        result = COMMANDS[args.command][0](args, cfg)
        if result is not None:
            header, rows = result
            emit(rows, header, cfg.output_format)
        if args.command == "oracle-suite" and not all(r[-1] for r in result[1]):
            return 1
        return 0
    except PermfixError as exc:
        sys.stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return exc.exit_code
    except (ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": "domain", "message": str(exc)}) + "\n")
        return DomainError.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
