"""Working-set todolist over the fixed universe {1..n}.

Accessing x costs about log_{2-eps} w(x) comparisons, where w(x) is
the number of distinct keys touched since x's last access (n if never
accessed): level L_i always contains every key with w <= (2-eps)^i
(property 5), so the top-down descent meets x early.  Detection uses
one extra equality comparison at perfect-square levels; the bottom
level needs none because every access is a member of the universe.

A doubly-linked recency queue orders all keys by working-set number.
Rebuilds label a prefix of the queue with positions and rebuild the
top lists taking every labelled key that is recent enough for its
level plus every second leftover, which restores |L_0| <= 1/eps + 1.

Keys double as record ids, so "the successor's key" and "the successor
record" are the same integer and each key's occurrence list is one row
of a fixed-width table.
"""

import bisect
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._accel import kernel
from .core import H, N, SLOTS, InvariantViolation, check_epsilon
from .stats import CMP, LREB, TOUCHES, VISITS, OpStats, lt, new_counters

WST_SIZE = 3

_WERRORS = {
    1: "property 1' violated: |L_0| > 1/eps + 1",
    2: "level not sorted",
    3: "level size bookkeeping mismatch",
    4: "property 3 violated",
    5: "bottom level is not the full universe",
    6: "span/top inconsistent with level membership",
    7: "stale label on a queue node",
    8: "recency queue is not a permutation of the universe",
    9: "slot bookkeeping mismatch",
}


def height_for(n, epsilon):
    """Smallest h with (2-eps)^h >= n (0 for a single key)."""
    if n <= 1:
        return 0
    h = 0
    p = 1.0
    while p < n:
        p *= 2.0 - epsilon
        h += 1
    return h


def level_for_wsn(w, epsilon):
    """Smallest level index whose property-5 window covers w."""
    lvl = 0
    p = 1.0
    while p < w:
        p *= 2.0 - epsilon
        lvl += 1
    return lvl


def detection_level_bound(w, epsilon):
    """Level by which an access with working-set number w is found:
    first perfect square at or above its property-5 level."""
    i = level_for_wsn(w, epsilon)
    return i + math.ceil(2.0 * math.sqrt(i)) + 1


def comparison_bound(w, epsilon):
    """Per-access comparison budget used by the acceptance suite."""
    lg = level_for_wsn(w, epsilon)
    return lg + math.ceil(2.0 * math.sqrt(lg)) + math.ceil(1.0 / epsilon) + 4


def working_set_number(history, x, n):
    """Direct-definition working-set number: n if x never accessed,
    else the count of distinct values since x's last access."""
    last = None
    for i in range(len(history) - 1, -1, -1):
        if history[i] == x:
            last = i
            break
    if last is None:
        return n
    return len(set(history[last:]))


class WorkingSetOracle:
    """Incremental working-set numbers for a whole access sequence.

    Keeps last-access stamps plus a sorted list of live stamps; w(x)
    is the number of live stamps at or after x's.  Independent of both
    the direct-definition scan and the structure under test.
    """

    def __init__(self, n):
        self.n = n
        self._stamp = {}
        self._live = []  # sorted last-access stamps
        self._t = 0
        self.history = []

    def wsn(self, x):
        s = self._stamp.get(x)
        if s is None:
            return self.n
        return len(self._live) - bisect.bisect_left(self._live, s)

    def record(self, x):
        """Working-set number of x at access time, then mark the access."""
        w = self.wsn(x)
        old = self._stamp.get(x)
        if old is not None:
            self._live.pop(bisect.bisect_left(self._live, old))
        self._stamp[x] = self._t
        self._live.append(self._t)
        self._t += 1
        self.history.append(x)
        return w

    def recency_order(self):
        """Accessed keys, most recent first."""
        return [x for _, x in sorted(((s, x) for x, s in self._stamp.items()), reverse=True)]

    def wsn_all(self):
        """w for every key 1..n as an array (index 0 unused)."""
        w = np.full(self.n + 1, self.n, dtype=np.int64)
        for rank, x in enumerate(self.recency_order(), start=1):
            w[x] = rank
        return w


@kernel
def wt_build(link, top, qnext, qprev, label, level_size, st, n, h):
    st[H] = h
    st[N] = n
    link[0, h] = 1 if n >= 1 else 0
    for r in range(1, n + 1):
        link[r, h] = r + 1 if r < n else 0
        top[r] = h
        label[r] = 0
        qprev[r] = r - 1
        qnext[r] = r + 1 if r < n else 0
    qnext[0] = 1 if n >= 1 else 0
    qprev[0] = n
    level_size[h] = n
    total = n
    for j in range(h - 1, -1, -1):
        u = link[0, j + 1]
        prev = 0
        cnt = 0
        pos = 0
        while u != 0:
            pos += 1
            if pos % 2 == 0:
                link[prev, j] = u
                prev = u
                top[u] = j
                cnt += 1
            u = link[u, j + 1]
        link[prev, j] = 0
        level_size[j] = cnt
        total += cnt
    st[SLOTS] = total


@kernel
def wt_rebuild(link, top, qnext, qprev, label, level_size, st, eps, counters):
    """Label-driven partial rebuild restoring property 1'."""
    h = st[H]
    n = st[N]
    i = h
    p = 1.0
    for j in range(1, h + 1):
        p *= 2.0 - eps / 2.0
        if level_size[j] <= p:
            i = j
            break
    # label the first ceil((2-eps)^(i-1)) queue nodes with positions
    m = 1.0
    for _ in range(i - 1):
        m *= 2.0 - eps
    want = math.ceil(m)
    if want > n:
        want = n
    u = qnext[0]
    pos = 0
    while u != 0 and pos < want:
        pos += 1
        label[u] = pos
        u = qnext[u]
    old_low = 0
    for j in range(i):
        old_low += level_size[j]
    u = link[0, i]
    while u != 0:
        if top[u] < i:
            top[u] = i
        u = link[u, i]
    touches = 0
    thr = 1.0
    for _ in range(i):
        thr *= 2.0 - eps
    for j in range(i - 1, -1, -1):
        thr /= 2.0 - eps  # selection window (2-eps)^j for level j
        u = link[0, j + 1]
        prev = 0
        cnt = 0
        prev_taken = True
        while u != 0:
            lab = label[u]
            take = (lab != 0 and lab <= thr) or not prev_taken
            if take:
                link[prev, j] = u
                prev = u
                if top[u] > j:
                    top[u] = j
                cnt += 1
            prev_taken = take
            u = link[u, j + 1]
        link[prev, j] = 0
        level_size[j] = cnt
        touches += cnt
    u = qnext[0]
    pos = 0
    while u != 0 and pos < want:
        pos += 1
        label[u] = 0
        u = qnext[u]
    new_low = 0
    for j in range(i):
        new_low += level_size[j]
    st[SLOTS] += new_low - old_low
    counters[TOUCHES] += touches
    counters[LREB] += i
    return i, touches


@kernel
def wt_access(link, top, qnext, qprev, label, level_size, st, eps, x, counters, path):
    """Returns (found_level, comparisons, rebuild_index); rebuild_index
    is -1 when no rebuild ran."""
    h = st[H]
    comps = 0
    found_level = -1
    # level 0 is a small bucket: linear scan with an equality stop
    u = 0
    w = link[0, 0]
    while w != 0:
        comps += 1
        if lt(w, x, counters):
            u = w
            w = link[u, 0]
        else:
            break
    path[0] = u
    if w != 0:
        comps += 1
        if not lt(x, w, counters):
            found_level = 0
    if found_level < 0:
        next_sq = 1
        root = 1
        for lvl in range(1, h + 1):
            w = link[u, lvl]
            if w != 0:
                comps += 1
                if lt(w, x, counters):
                    u = w
            path[lvl] = u
            if lvl == h:
                found_level = h  # universe-complete: successor is x
                break
            if lvl == next_sq:
                root += 1
                next_sq = root * root
                w2 = link[u, lvl]
                if w2 != 0:
                    comps += 1
                    if not lt(x, w2, counters):
                        found_level = lvl
                        break
    counters[VISITS] += comps + 1
    # splice x into the levels above its span (preds already on path)
    t = top[x]
    for lvl in range(t):
        link[x, lvl] = link[path[lvl], lvl]
        link[path[lvl], lvl] = x
        level_size[lvl] += 1
    if t > 0:
        top[x] = 0
        st[SLOTS] += t
    # move to the front of the recency queue
    qnext[qprev[x]] = qnext[x]
    qprev[qnext[x]] = qprev[x]
    f = qnext[0]
    qnext[0] = x
    qprev[x] = 0
    qnext[x] = f
    qprev[f] = x
    reb = -1
    if level_size[0] > 1.0 / eps + 1.0:
        reb, _ = wt_rebuild(link, top, qnext, qprev, label, level_size, st, eps, counters)
    return found_level, comps, reb


@kernel
def wt_access_many(link, top, qnext, qprev, label, level_size, st, eps, xs,
                   counters, path, out_comps, out_levels):
    for k in range(xs.shape[0]):
        fl, comps, _ = wt_access(link, top, qnext, qprev, label, level_size,
                                 st, eps, xs[k], counters, path)
        out_comps[k] = comps
        out_levels[k] = fl


@kernel
def wt_validate(link, top, qnext, qprev, label, level_size, st, eps, scratch):
    h = st[H]
    n = st[N]
    if level_size[0] > 1.0 / eps + 1.0:
        return 1
    total = 0
    for lvl in range(h + 1):
        u = link[0, lvl]
        cnt = 0
        prev = 0
        while u != 0:
            if cnt > 0 and u <= prev:
                return 2
            if top[u] > lvl:
                return 6
            prev = u
            cnt += 1
            u = link[u, lvl]
        if cnt != level_size[lvl]:
            return 3
        total += cnt
    if total != st[SLOTS]:
        return 9
    if level_size[h] != n:
        return 5
    # exact spans: members of L_lvl must be exactly the keys with top <= lvl
    for r in range(h + 1):
        scratch[r] = 0
    for r in range(1, n + 1):
        scratch[top[r]] += 1
    run = 0
    for lvl in range(h + 1):
        run += scratch[lvl]
        if run != level_size[lvl]:
            return 6
    # property 3 between adjacent levels
    for lvl in range(1, h + 1):
        u = link[0, lvl]
        prev_in = True
        while u != 0:
            now_in = top[u] <= lvl - 1
            if not now_in and not prev_in:
                return 4
            prev_in = now_in
            u = link[u, lvl]
    # labels cleared; queue is a permutation chained both ways
    seen = 0
    u = qnext[0]
    prev = 0
    while u != 0:
        if label[u] != 0:
            return 7
        if qprev[u] != prev:
            return 8
        prev = u
        seen += 1
        if seen > n:
            return 8
        u = qnext[u]
    if seen != n or qprev[0] != prev:
        return 8
    return 0


@kernel
def wt_check_p5(top, wsn, st, eps):
    """Property 5 against oracle working-set numbers: every key must
    live at or above the level covering its w."""
    n = st[N]
    for x in range(1, n + 1):
        lvl = 0
        p = 1.0
        while p < wsn[x]:
            p *= 2.0 - eps
            lvl += 1
        if top[x] > lvl:
            return x
    return 0


@dataclass(frozen=True)
class AccessOutcome:
    found_level: int
    comparisons: int
    rebuild: Optional[dict] = None


class WorkingTodoList:
    """Searchable fixed universe {1..n} with the working-set property."""

    def __init__(self, universe_size, epsilon):
        n = int(universe_size)
        if n < 1:
            raise ValueError("universe size must be >= 1, got %r" % (universe_size,))
        self.epsilon = check_epsilon(epsilon)
        self.n = n
        h = height_for(n, self.epsilon)
        self._link = np.zeros((n + 1, h + 1), dtype=np.int32)
        self._top = np.zeros(n + 1, dtype=np.int32)
        self._qnext = np.zeros(n + 1, dtype=np.int32)
        self._qprev = np.zeros(n + 1, dtype=np.int32)
        self._label = np.zeros(n + 1, dtype=np.int64)
        self._lsize = np.zeros(h + 1, dtype=np.int64)
        self._st = np.zeros(WST_SIZE, dtype=np.int64)
        self._path = np.zeros(h + 2, dtype=np.int64)
        self._scratch = np.zeros(h + 2, dtype=np.int64)
        self._counters = new_counters()
        self.stats = OpStats(self._counters)
        wt_build(self._link, self._top, self._qnext, self._qprev, self._label,
                 self._lsize, self._st, n, h)

    @property
    def height(self):
        return int(self._st[H])

    def _args(self):
        return (self._link, self._top, self._qnext, self._qprev, self._label,
                self._lsize, self._st)

    def access(self, x):
        x = int(x)
        if not (1 <= x <= self.n):
            raise ValueError("key %r outside universe 1..%d" % (x, self.n))
        fl, comps, reb = wt_access(*self._args(), self.epsilon, np.int64(x),
                                   self._counters, self._path)
        report = None if reb < 0 else {"levels_rebuilt": int(reb)}
        return AccessOutcome(found_level=int(fl), comparisons=int(comps), rebuild=report)

    def access_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        if xs.shape[0] and (xs.min() < 1 or xs.max() > self.n):
            raise ValueError("access outside universe 1..%d" % self.n)
        comps = np.zeros(xs.shape[0], dtype=np.int64)
        levels = np.zeros(xs.shape[0], dtype=np.int64)
        wt_access_many(*self._args(), self.epsilon, xs, self._counters,
                       self._path, comps, levels)
        return comps, levels

    def rebuild(self):
        i, touches = wt_rebuild(*self._args(), self.epsilon, self._counters)
        return {"levels_rebuilt": int(i), "touches": int(touches)}

    # -- debug / test support -------------------------------------------

    def level_keys(self, lvl):
        out = []
        u = int(self._link[0, lvl])
        while u != 0:
            out.append(u)
            u = int(self._link[u, lvl])
        return out

    def level_sizes(self):
        return [int(v) for v in self._lsize]

    def top_of(self, x):
        return int(self._top[x])

    def queue_order(self):
        out = []
        u = int(self._qnext[0])
        while u != 0:
            out.append(u)
            u = int(self._qnext[u])
        return out

    def validate(self, wsn=None):
        code = int(wt_validate(*self._args(), self.epsilon, self._scratch))
        if code != 0:
            raise InvariantViolation("%s (code %d)" % (_WERRORS.get(code, "?"), code))
        if wsn is not None:
            bad = int(wt_check_p5(self._top, np.ascontiguousarray(wsn, dtype=np.int64),
                                  self._st, self.epsilon))
            if bad != 0:
                raise InvariantViolation(
                    "property 5 violated: key %d sits below its working-set level" % bad)
