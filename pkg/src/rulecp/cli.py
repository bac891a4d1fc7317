"""Command-line entry point.

Exit codes: 0 ok, 2 input error, 3 verification or assertion failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import load_bench_problem, run_bench
from .core import Table
from .errors import RulecpError
from .formats import format_rules, format_rules_chr, load_problem, load_table, parse_rules
from .membership import _universe, generate_minimal_rules, is_minimal, is_valid, remove_redundant
from .oracles import enumerate_solutions
from .scheduler import SCHEDULERS
from .search import KINDS, SELECTIONS, SPLITS, Propagator, SplitStrategy, solve

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3


class InputError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("RULECP_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"RULECP_SEED must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def _table(path: str):
    try:
        names, tuples = load_table(path)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    return names, Table(tuple(range(len(names))), tuples)


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- solve ------------------------------------------------------------------


def cmd_solve(args) -> int:
    try:
        p = load_problem(args.file)
    except OSError as e:
        raise InputError(f"{args.file}: {e.strerror}") from None
    seed = args.seed if args.seed is not None else _default_seed()
    propagator = Propagator(args.propagator, args.scheduler, args.choose, args.rules)
    strategy = SplitStrategy(args.select, args.split, args.order)
    res = solve(p, propagator, strategy, mode="all" if args.all else "first", seed=seed, trace=args.trace)
    if args.trace:
        print(res.trace.to_text())
    for sol in res.solutions:
        print(" ".join(f"{n}={v}" for n, v in zip(p.names, sol)))
    print(res.stats.record())
    if args.oracle:
        expected = enumerate_solutions(p)
        got = set(res.solutions)
        ok = got == expected if args.all else (got <= expected and bool(got) == bool(expected))
        if not ok:
            print(f"oracle mismatch: solver {len(got)}, oracle {len(expected)}", file=sys.stderr)
            return EXIT_VERIFY
        print(f"oracle: ok ({len(expected)} solutions)", file=sys.stderr)
    return EXIT_OK


# --- rules ------------------------------------------------------------------


def cmd_rules_gen(args) -> int:
    names, c = _table(args.table)
    rules = generate_minimal_rules(c)
    if args.minimize:
        rules = remove_redundant(rules, c)
    text = format_rules_chr(rules, names, args.chr) if args.chr else format_rules(rules, names)
    _emit(text, args.output)
    print(f"{len(rules)} rules", file=sys.stderr)
    return EXIT_OK


def _rules_for(args):
    names, c = _table(args.table)
    rules = parse_rules(_read(args.rules), names, args.rules)
    return names, c, rules


def cmd_rules_minimize(args) -> int:
    names, c, rules = _rules_for(args)
    for r in rules:
        if not is_valid(r, c):
            print(f"invalid rule: {r.render(names)}", file=sys.stderr)
            return EXIT_VERIFY
    kept = remove_redundant(rules, c)
    _emit(format_rules(kept, names), args.output)
    print(f"before={len(rules)} after={len(kept)}", file=sys.stderr)
    return EXIT_OK


def cmd_rules_check(args) -> int:
    names, c, rules = _rules_for(args)
    U = _universe(c, None)
    bad = 0
    for r in rules:
        if not is_valid(r, c, U):
            verdict = "invalid"
        elif not is_minimal(r, c, U):
            verdict = "non-minimal"
        else:
            verdict = "minimal"
        bad += verdict != "minimal"
        print(f"{verdict}: {r.render(names)}")
    print(f"{len(rules) - bad}/{len(rules)} minimal", file=sys.stderr)
    return EXIT_VERIFY if bad else EXIT_OK


# --- bench ------------------------------------------------------------------


def _csv_list(text: str, allowed=None, cast=str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    out = []
    for t in items:
        if allowed is not None and t not in allowed:
            raise InputError(f"unknown value {t!r}, expected one of {', '.join(allowed)}")
        try:
            out.append(cast(t))
        except ValueError:
            raise InputError(f"bad value {t!r}") from None
    if not out:
        raise InputError("empty list")
    return out


def cmd_bench(args) -> int:
    problems = []
    for f in args.files:
        try:
            problems.append(load_bench_problem(f))
        except OSError as e:
            raise InputError(f"{f}: {e.strerror}") from None
    seeds = _csv_list(args.seeds, cast=int) if args.seeds else [_default_seed()]
    report = run_bench(
        problems,
        schedulers=_csv_list(args.schedulers, SCHEDULERS),
        seeds=seeds,
        rule_modes=_csv_list(args.rules, ("all", "minimized")),
        kind=args.propagator,
        choose=args.choose,
    )
    _emit(report.to_csv(), args.output)
    for problem, label, ratio in report.ratios():
        print(f"ratio {problem} {label} = {ratio:.2f}", file=sys.stderr)
    if args.check:
        bad = report.violations()
        for v in bad:
            print(f"violation: {v}", file=sys.stderr)
        if bad:
            return EXIT_VERIFY
    return EXIT_OK


# --- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rulecp", description="Rule-based constraint propagation and search.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("file")
    s.add_argument("--propagator", choices=KINDS, default="membership")
    s.add_argument("--scheduler", choices=SCHEDULERS, default="finetuned")
    s.add_argument("--split", choices=SPLITS, default="enum")
    s.add_argument("--select", choices=SELECTIONS, default="first")
    s.add_argument("--order", choices=("ascending", "random"), default="ascending")
    s.add_argument("--choose", choices=("fifo", "lifo", "random"), default="fifo")
    s.add_argument("--rules", choices=("all", "minimized"), default="all")
    s.add_argument("--seed", type=int)
    s.add_argument("--all", action="store_true", help="enumerate every solution")
    s.add_argument("--trace", action="store_true", help="print the root derivation")
    s.add_argument("--oracle", action="store_true", help="cross-check against brute-force enumeration")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("rules", help="membership rule generation and checking")
    rs = r.add_subparsers(dest="action", required=True)
    g = rs.add_parser("gen", help="generate all minimal membership rules")
    g.add_argument("table")
    g.add_argument("--output", "-o")
    g.add_argument("--minimize", action="store_true", help="also drop redundant rules")
    g.add_argument("--chr", metavar="NAME", nargs="?", const="c", help="emit CHR propagation rules")
    g.set_defaults(func=cmd_rules_gen)
    m = rs.add_parser("minimize", help="remove redundant rules")
    m.add_argument("rules")
    m.add_argument("--table", required=True)
    m.add_argument("--output", "-o")
    m.set_defaults(func=cmd_rules_minimize)
    c = rs.add_parser("check", help="report validity and minimality per rule")
    c.add_argument("rules")
    c.add_argument("--table", required=True)
    c.set_defaults(func=cmd_rules_check)

    b = sub.add_parser("bench", help="compare schedulers by counters")
    b.add_argument("files", nargs="+", help="problem (.json) or table (.table) files")
    b.add_argument("--schedulers", default=",".join(SCHEDULERS))
    b.add_argument("--seeds", help="comma-separated seeds (default RULECP_SEED or 0)")
    b.add_argument("--rules", default="all", help="all, minimized, or all,minimized")
    b.add_argument("--propagator", choices=KINDS, default="membership")
    b.add_argument("--choose", choices=("fifo", "lifo", "random"), default="fifo")
    b.add_argument("--output", "-o")
    b.add_argument("--assert", dest="check", action="store_true", help="exit 3 on a counter-ordering violation")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RulecpError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

if __name__ == "__main__":
    sys.exit(main())
