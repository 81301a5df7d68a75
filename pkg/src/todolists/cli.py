"""Benchmark command line: sweep / race / wset / oracle / backends.

Everything prints CSV (path via --out, else stdout).  Exit status is 0
on success, 2 on usage errors, 1 on oracle divergence or a broken
working-set comparison budget.
"""

import argparse
import json
import os
import subprocess
import sys

from . import benchkit
from .workloads import WSET_PATTERNS

PAPER_SWEEP_N = 10 ** 6
DESK_SWEEP_N = 10 ** 5
PAPER_RACE = (25_000, 2_000_000, 25_000)
DESK_RACE = (25_000, 100_000, 25_000)


def _out_stream(args):
    if args.out and args.out != "-":
        return open(args.out, "w")
    return sys.stdout


def _emit(records, args):
    fh = _out_stream(args)
    try:
        benchkit.write_csv(records, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _add_common(p):
    p.add_argument("--seed", type=int, default=1, help="workload seed")
    p.add_argument("--out", default="-", help="CSV output path (default stdout)")
    p.add_argument("--paper-scale", action="store_true",
                   help="use the published experiment sizes instead of desk-scale defaults")


def cmd_sweep(args):
    n = args.n or (PAPER_SWEEP_N if args.paper_scale else DESK_SWEEP_N)
    eps_values = benchkit.eps_range(args.eps_from, args.eps_to, args.eps_step)
    records = benchkit.run_epsilon_sweep(n, eps_values, args.seed)
    _emit(records, args)
    return 0


def cmd_race(args):
    if args.n:
        n_values = [args.n]
    else:
        lo, hi, step = PAPER_RACE if args.paper_scale else DESK_RACE
        if args.n_from:
            lo = args.n_from
        if args.n_to:
            hi = args.n_to
        if args.n_step:
            step = args.n_step
        n_values = list(range(lo, hi + 1, step))
    structures = [s.strip() for s in args.structures.split(",") if s.strip()]
    for sid in structures:
        if sid not in benchkit.STRUCTURE_IDS:
            raise SystemExit("unknown structure %r; valid ids: %s"
                             % (sid, ", ".join(benchkit.STRUCTURE_IDS)))
    eps_values = [float(e) for e in args.eps.split(",") if e.strip()]
    records = benchkit.run_race(n_values, structures, args.seed, eps_values)
    _emit(records, args)
    return 0


def cmd_wset(args):
    if args.pattern not in WSET_PATTERNS:
        raise SystemExit("invalid pattern %r (expected one of %s)"
                         % (args.pattern, ", ".join(WSET_PATTERNS)))
    n = args.n or 10 ** 4
    length = args.length or 10 ** 4
    records, per_access, violations = benchkit.run_working_set(
        n, args.pattern, length, args.seed, epsilon=args.eps_value,
        zipf_s=args.zipf_s, window=args.window)
    _emit(records, args)
    if args.per_access:
        with open(args.per_access, "w") as fh:
            fh.write("access_idx,key,wsn,comparisons,found_level,bound\n")
            for i in range(len(per_access["key"])):
                fh.write("%d,%d,%d,%d,%d,%d\n" % (
                    i, per_access["key"][i], per_access["wsn"][i],
                    per_access["comparisons"][i], per_access["found_level"][i],
                    per_access["bound"][i]))
    if violations:
        print("working-set comparison budget exceeded on %d of %d accesses"
              % (violations, length), file=sys.stderr)
        return 1
    return 0


def cmd_oracle(args):
    structures = [s.strip() for s in args.structures.split(",") if s.strip()]
    rc = 0
    for sid in structures:
        if sid not in benchkit.DYNAMIC_STRUCTURES:
            raise SystemExit("oracle checks need a dynamic structure; valid: %s"
                             % ", ".join(benchkit.DYNAMIC_STRUCTURES))
        report = benchkit.run_oracle_check(sid, args.ops, args.seed,
                                           epsilon=args.eps_value)
        print(json.dumps(report))
        if not report["ok"]:
            rc = 1
    return rc


def cmd_backends(args):
    if args.probe_only:
        probe = benchkit.backend_probe(n=args.n or 30000, seed=args.seed)
        print(json.dumps(probe))
        return 0
    rows = []
    for flag in ("1", "0"):
        env = dict(os.environ, TODOLISTS_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, "-m", "todolists.cli", "backends", "--probe-only",
             "--n", str(args.n or 30000), "--seed", str(args.seed)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return proc.returncode
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    fh = _out_stream(args)
    try:
        fh.write("backend,packed_insert_ns,packed_search_ns,linked_insert_ns,linked_search_ns\n")
        for r in rows:
            fh.write("%s,%d,%d,%d,%d\n" % (
                r["backend"], r["packed_insert_ns"], r["packed_search_ns"],
                r["linked_insert_ns"], r["linked_search_ns"]))
        if len(rows) == 2 and rows[1]["packed_search_ns"]:
            speedup = rows[1]["packed_search_ns"] / max(rows[0]["packed_search_ns"], 1)
            fh.write("# numba search speedup over python backend: %.1fx\n" % speedup)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="todolists-bench",
        description="comparison-count benchmarks for todolist dictionaries")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sweep", help="insert/search cost as a function of epsilon")
    ps.add_argument("--n", type=int, default=0, help="inserted draws per trial")
    ps.add_argument("--eps-from", type=float, default=0.02)
    ps.add_argument("--eps-to", type=float, default=0.68)
    ps.add_argument("--eps-step", type=float, default=0.01)
    _add_common(ps)
    ps.set_defaults(fn=cmd_sweep)

    pr = sub.add_parser("race", help="structures racing over growing n")
    pr.add_argument("--n", type=int, default=0, help="run a single size instead of a range")
    pr.add_argument("--n-from", type=int, default=0)
    pr.add_argument("--n-to", type=int, default=0)
    pr.add_argument("--n-step", type=int, default=0)
    pr.add_argument("--structures",
                    default="todolist,skiplist,skiplist-cached,sorted-array,static-tree")
    pr.add_argument("--eps", default="0.2,0.35",
                    help="comma list of epsilons for the todolist entries")
    _add_common(pr)
    pr.set_defaults(fn=cmd_race)

    pw = sub.add_parser("wset", help="working-set workloads on the fixed universe")
    pw.add_argument("--n", type=int, default=0, help="universe size")
    pw.add_argument("--length", type=int, default=0, help="number of accesses")
    pw.add_argument("--pattern", default="uniform",
                    help="one of: %s" % ", ".join(WSET_PATTERNS))
    pw.add_argument("--eps", dest="eps_value", type=float, default=0.2)
    pw.add_argument("--zipf-s", type=float, default=1.2)
    pw.add_argument("--window", type=int, default=16)
    pw.add_argument("--per-access", default="",
                    help="also write one CSV row per access to this path")
    _add_common(pw)
    pw.set_defaults(fn=cmd_wset)

    po = sub.add_parser("oracle", help="differential check against the sorted-set model")
    po.add_argument("--structures", default=",".join(benchkit.DYNAMIC_STRUCTURES))
    po.add_argument("--ops", type=int, default=10 ** 5)
    po.add_argument("--eps", dest="eps_value", type=float, default=0.2)
    _add_common(po)
    po.set_defaults(fn=cmd_oracle)

    pb = sub.add_parser("backends", help="time the numba kernels against the pure-python path")
    pb.add_argument("--n", type=int, default=0)
    pb.add_argument("--probe-only", action="store_true",
                    help="run only the active backend and print JSON")
    _add_common(pb)
    pb.set_defaults(fn=cmd_backends)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
