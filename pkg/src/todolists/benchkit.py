"""Experiment runners: epsilon sweep, structure race, working-set
workloads, and differential oracle checks, all emitting one CSV row
per (trial, phase) in a fixed schema.

Counters are machine-independent; the wall_ns column is informational
only and is the single nondeterministic field.
"""

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .baselines import SkipList, SortedArray, StaticTree
from .core import TodoList
from .model import SortedSetModel
from .packed import PackedTodoList
from .stats import CMP, GREB, TOUCHES, VISITS
from .workloads import WorkloadSpec, mixed_ops, wset_accesses
from .working import WorkingSetOracle, WorkingTodoList, comparison_bound

CSV_HEADER = ("structure,epsilon,n,n_distinct,phase,ops,comparisons,"
              "node_visits,rebuild_touches,global_rebuilds,seed,wall_ns")

DYNAMIC_STRUCTURES = ("todolist", "todolist-linked", "skiplist", "skiplist-cached")
STATIC_STRUCTURES = ("sorted-array", "static-tree")
STRUCTURE_IDS = DYNAMIC_STRUCTURES + STATIC_STRUCTURES


@dataclass(frozen=True)
class BenchRecord:
    structure: str
    epsilon: Optional[float]
    n: int
    n_distinct: int
    phase: str
    ops: int
    comparisons: int
    node_visits: int
    rebuild_touches: int
    global_rebuilds: int
    seed: int
    wall_ns: int

    def csv_row(self):
        eps = "" if self.epsilon is None else ("%g" % self.epsilon)
        return ",".join(str(v) for v in (
            self.structure, eps, self.n, self.n_distinct, self.phase,
            self.ops, self.comparisons, self.node_visits,
            self.rebuild_touches, self.global_rebuilds, self.seed,
            self.wall_ns))


def write_csv(records, fh):
    fh.write(CSV_HEADER + "\n")
    for r in records:
        fh.write(r.csv_row() + "\n")


def make_structure(structure, epsilon=None, seed=0):
    if structure in ("todolist", "todolist-packed"):
        return PackedTodoList(epsilon if epsilon is not None else 0.2)
    if structure in ("todolist-linked", "core"):
        return TodoList(epsilon if epsilon is not None else 0.2)
    if structure == "skiplist":
        return SkipList(seed=seed)
    if structure == "skiplist-cached":
        return SkipList(seed=seed, cached=True)
    raise ValueError("unknown structure %r; valid ids: %s"
                     % (structure, ", ".join(STRUCTURE_IDS)))


def _phase_record(structure, epsilon, n, n_distinct, phase, ops, delta, seed, wall_ns):
    return BenchRecord(
        structure=structure, epsilon=epsilon, n=n, n_distinct=n_distinct,
        phase=phase, ops=ops,
        comparisons=int(delta[CMP]), node_visits=int(delta[VISITS]),
        rebuild_touches=int(delta[TOUCHES]), global_rebuilds=int(delta[GREB]),
        seed=seed, wall_ns=wall_ns)


def run_trial(structure, n, seed, epsilon=None):
    """One insert-then-search trial; returns (records, per_search_comps)."""
    spec = WorkloadSpec(seed=seed, n=n, structure=structure, epsilon=epsilon)
    ins = spec.insert_keys()
    srch = spec.search_keys()
    records = []
    if structure in STATIC_STRUCTURES:
        distinct = np.unique(ins)
        t0 = time.perf_counter_ns()
        if structure == "sorted-array":
            s = SortedArray.from_sorted(distinct)
        else:
            s = StaticTree.from_sorted(distinct)
        wall = time.perf_counter_ns() - t0
        n_distinct = s.n
        records.append(_phase_record(structure, epsilon, n, n_distinct,
                                     "insert", n, np.zeros(16, dtype=np.int64),
                                     seed, wall))
    else:
        s = make_structure(structure, epsilon, seed)
        before = s.stats.snapshot()
        t0 = time.perf_counter_ns()
        s.insert_many(ins)
        wall = time.perf_counter_ns() - t0
        delta = s.stats.snapshot() - before
        n_distinct = s.n
        records.append(_phase_record(structure, epsilon, n, n_distinct,
                                     "insert", n, delta, seed, wall))
    before = s.stats.snapshot()
    t0 = time.perf_counter_ns()
    total, comps = s.search_many(srch)
    wall = time.perf_counter_ns() - t0
    delta = s.stats.snapshot() - before
    records.append(_phase_record(structure, epsilon, n, n_distinct,
                                 "search", len(srch), delta, seed, wall))
    return records, comps


def run_epsilon_sweep(n, eps_values, seed, structure="todolist"):
    """One trial per epsilon; the seed is reused so every epsilon sees
    the identical workload."""
    records = []
    for eps in eps_values:
        recs, _ = run_trial(structure, n, seed, epsilon=float(eps))
        records.extend(recs)
    return records


def eps_range(eps_from, eps_to, eps_step):
    if not (0.0 < eps_from <= eps_to < 1.0) or eps_step <= 0:
        raise ValueError("invalid epsilon range %g..%g step %g"
                         % (eps_from, eps_to, eps_step))
    out = []
    k = 0
    while True:
        v = eps_from + k * eps_step
        if v > eps_to + 1e-12:
            break
        out.append(round(v, 10))
        k += 1
    return out


def run_race(n_values, structures, seed, eps_values=(0.2, 0.35)):
    """The structure race: n inserts then 5n searches per structure
    and size; todolists run once per epsilon."""
    records = []
    for n in n_values:
        for sid in structures:
            if sid not in STRUCTURE_IDS:
                raise ValueError("unknown structure %r; valid ids: %s"
                                 % (sid, ", ".join(STRUCTURE_IDS)))
            if sid.startswith("todolist"):
                for eps in eps_values:
                    recs, _ = run_trial(sid, n, seed, epsilon=float(eps))
                    records.extend(recs)
            else:
                recs, _ = run_trial(sid, n, seed)
                records.extend(recs)
    return records


def run_working_set(n, pattern, length, seed, epsilon=0.2, zipf_s=1.2, window=16):
    """Working-set workload: returns (records, per_access, violations).

    per_access carries the oracle working-set number, the measured
    comparisons and the comparison budget for every access; violations
    counts accesses that beat their budget (expected zero at the
    validated scales)."""
    xs = wset_accesses(seed, pattern, length, n, zipf_s=zipf_s, window=window)
    wt = WorkingTodoList(n, epsilon)
    oracle = WorkingSetOracle(n)
    w_arr = np.fromiter((oracle.record(int(x)) for x in xs), dtype=np.int64,
                        count=len(xs))
    before = wt.stats.snapshot()
    t0 = time.perf_counter_ns()
    comps, levels = wt.access_many(xs)
    wall = time.perf_counter_ns() - t0
    delta = wt.stats.snapshot() - before
    bounds = np.fromiter((comparison_bound(int(w), epsilon) for w in w_arr),
                         dtype=np.int64, count=len(xs))
    violations = int((comps > bounds).sum())
    rec = _phase_record("working-todolist", epsilon, n, n, "access",
                        int(length), delta, seed, wall)
    per_access = {"key": xs, "wsn": w_arr, "comparisons": comps,
                  "found_level": levels, "bound": bounds}
    return [rec], per_access, violations


def run_oracle_check(structure, ops, seed, epsilon=0.2, key_range=4096,
                     p_insert=0.5, p_delete=0.25):
    """Replay a mixed stream on a structure and the sorted-set model.

    ``structure`` is a registered id or a prebuilt instance (the
    fault-injection tests hand in deliberately corrupted engines).
    Returns a report dict; on divergence it carries the failing prefix
    length and the op that broke."""
    if ops < 1:
        raise ValueError("ops must be >= 1")
    if isinstance(structure, str):
        s = make_structure(structure, epsilon, seed)
        model = SortedSetModel()
    else:
        s = structure
        model = SortedSetModel(getattr(s, "keys", list)())
        structure = type(s).__name__
    op_codes, keys = mixed_ops(seed, ops, key_range, p_insert=p_insert,
                               p_delete=p_delete)
    t0 = time.perf_counter_ns()
    for i in range(ops):
        op = int(op_codes[i])
        x = int(keys[i])
        if op == 0:
            got, want = s.insert(x), model.insert(x)
            name = "insert"
        elif op == 1:
            got, want = s.delete(x), model.delete(x)
            name = "delete"
        else:
            name = "search"
            got, want = s.contains(x), model.contains(x)
            if got == want:
                got = s.find_predecessor(x).predecessor_key
                want = model.predecessor(x)
        if got != want or s.n != model.n:
            return {
                "ok": False, "structure": structure, "seed": seed,
                "prefix": i + 1, "op_index": i, "op": name, "key": x,
                "expected": want, "got": got,
                "wall_ns": time.perf_counter_ns() - t0,
            }
    return {"ok": True, "structure": structure, "seed": seed, "ops": ops,
            "wall_ns": time.perf_counter_ns() - t0}


def backend_probe(n=30000, seed=42):
    """Small fixed workload timing the active kernel backend."""
    from ._accel import backend_name
    recs, _ = run_trial("todolist", n, seed, epsilon=0.2)
    recs_core, _ = run_trial("todolist-linked", n, seed, epsilon=0.2)
    return {
        "backend": backend_name(),
        "packed_insert_ns": recs[0].wall_ns,
        "packed_search_ns": recs[1].wall_ns,
        "linked_insert_ns": recs_core[0].wall_ns,
        "linked_search_ns": recs_core[1].wall_ns,
    }
