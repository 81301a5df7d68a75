"""Cache-conscious todolist engine: one record per element.

Each stored key owns a single record holding a power-of-two link
table: one successor reference plus that successor's key, per level of
the record's span [top_level, h].  Searches therefore decide the next
move from the key cached in the *current* record and only dereference
a successor when actually advancing; dropping a level stays inside the
record (the layout-adjacency the race experiments measure).

Tables are bottom-anchored: the slot for level ``lvl`` is
``off + (h - lvl)``.  The bottom slot survives global height changes
untouched (the preserved level is always the bottom), and promotions
append instead of sliding, which keeps the amortized cost of a height
increase proportional to the increase.  Table capacity is kept at
exactly ``2**ceil(log2(height))`` at all times, reallocating whenever
the rounded size changes, so total allocated slots stay under twice
the occupied slots.

Observable behavior (results, comparison counts, level contents, n and
h trajectories) is identical to :class:`todolists.core.TodoList`.
"""

import math

import numpy as np

from ._accel import NIL, kernel
from .core import (
    H,
    MAX_LEVELS,
    N,
    SLIM_FACTOR,
    SLOTS,
    InvariantViolation,
    _height_ceil,
    _pow_ceil,
    check_epsilon,
)
from .stats import (
    ADJ,
    CMP,
    COPIED,
    COPIED_SHRINK,
    GREB,
    LREB,
    PROMO_DELTA,
    STEPS,
    TOUCHES,
    VISITS,
    OpStats,
    SearchOutcome,
    lt,
    new_counters,
)

# extra scalar-state slots (first five shared with core's layout)
RHWM = 3    # record-pool high-water mark
RFTOP = 4   # free-record stack height
LTOP = 5    # link-pool bump pointer
CAPSUM = 6  # total allocated link slots over element records
PST_SIZE = 7

N_CLASSES = 34  # power-of-two size classes for link blocks

_PERRORS = {
    20: "cached key does not match the successor's key",
    21: "successor's span does not cover the level it is linked on",
    22: "record capacity is not the power-of-two of its height",
    23: "capacity bookkeeping (CAPSUM) mismatch",
    24: "allocated link slots exceed twice the occupied slots",
    25: "record top/span inconsistent with level membership counts",
}
_PERRORS.update(
    {k: v for k, v in (
        (1, "property 1 violated: |L_0| > 1"),
        (2, "level not strictly sorted"),
        (3, "property 2 violated (subset)"),
        (4, "property 3 violated"),
        (5, "property 4 violated: bottom level count != n"),
        (6, "level_size bookkeeping mismatch"),
        (7, "slot_count bookkeeping mismatch"),
        (8, "height above ceil(log_{2-eps} n) + 1"),
        (10, "rest-state size bound violated"),
        (11, "slot_count > c*n at rest"),
    )}
)


def table_capacity(height):
    """Link-table size for a record spanning ``height`` levels: the
    smallest power of two >= height (never more than twice it)."""
    if height < 1:
        raise ValueError("height must be positive")
    return 1 << int(math.ceil(math.log2(height)))


@kernel
def _class_of(height):
    # smallest k with 2**k >= height
    k = 0
    c = 1
    while c < height:
        c <<= 1
        k += 1
    return k, c


@kernel
def _blk_alloc(lnext, heads, st, k):
    b = np.int64(heads[k])
    if b != NIL:
        heads[k] = lnext[b]
        return b
    b = st[LTOP]
    if b + (1 << k) > lnext.shape[0]:
        raise RuntimeError("link pool exhausted")
    st[LTOP] += 1 << k
    return b


@kernel
def _blk_free(lnext, heads, b, k):
    lnext[b] = heads[k]
    heads[k] = b


@kernel
def _rec_alloc(rfree, st):
    if st[RFTOP] > 0:
        st[RFTOP] -= 1
        return np.int64(rfree[st[RFTOP]])
    rid = st[RHWM]
    if rid >= rfree.shape[0]:
        raise RuntimeError("record pool exhausted")
    st[RHWM] += 1
    return rid


@kernel
def _set_top(rkey, top, off, cap, lnext, lkey, heads, st, rid, new_top, counters):
    """Move a record's span to [new_top, h], reallocating its table
    when the power-of-two size changes.  Keeps SLOTS/CAPSUM exact."""
    h = st[H]
    old_top = top[rid]
    if new_top == old_top and (1 << _class_of(h - old_top + 1)[0]) == cap[rid]:
        return
    nh = h - new_top + 1
    oh = h - old_top + 1
    k, c = _class_of(nh)
    if c != cap[rid]:
        nb = _blk_alloc(lnext, heads, st, k)
        keep = nh if nh < oh else oh
        ob = off[rid]
        for s in range(keep):
            lnext[nb + s] = lnext[ob + s]
            lkey[nb + s] = lkey[ob + s]
        if new_top < old_top:
            counters[COPIED] += keep
        else:
            counters[COPIED_SHRINK] += keep
        ok, _ = _class_of(cap[rid])
        _blk_free(lnext, heads, ob, ok)
        st[CAPSUM] += c - cap[rid]
        off[rid] = nb
        cap[rid] = c
    if new_top < old_top:
        counters[PROMO_DELTA] += old_top - new_top
    top[rid] = new_top
    st[SLOTS] += old_top - new_top


@kernel
def _sent_resize(off, cap, lnext, lkey, heads, st, new_height):
    """The sentinel spans every level; same doubling rule, but its
    slots are not part of the element occupancy accounting."""
    k, c = _class_of(new_height)
    if c != cap[0]:
        nb = _blk_alloc(lnext, heads, st, k)
        old_h = cap[0] if cap[0] < new_height else new_height
        ob = off[0]
        for s in range(old_h):
            lnext[nb + s] = lnext[ob + s]
            lkey[nb + s] = lkey[ob + s]
        ok, _ = _class_of(cap[0])
        _blk_free(lnext, heads, ob, ok)
        off[0] = nb
        cap[0] = c


@kernel
def pk_search(rkey, top, off, cap, lnext, lkey, st, x, counters, path):
    """Descent using cached successor keys.

    Returns (pred_key, has_pred, found, comparisons, has_succ);
    comparison decisions and counts match the reference engine
    exactly, record dereferences happen only on advance."""
    h = st[H]
    u = np.int64(0)
    comps = 0
    adv = 0
    for lvl in range(h + 1):
        s = off[u] + (h - lvl)
        w = lnext[s]
        if w != NIL:
            comps += 1
            if lt(lkey[s], x, counters):
                u = np.int64(w)
                adv += 1
        path[lvl] = u
    counters[VISITS] += 1 + adv
    counters[STEPS] += h + 1
    counters[ADJ] += h + 1 - adv
    has_pred = u != 0
    pk = rkey[u] if has_pred else np.int64(0)
    s = off[u] + 0
    w = lnext[s]
    found = w != NIL and lkey[s] == x
    return pk, has_pred, found, comps, w != NIL


@kernel
def pk_rebuild_from(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, i, counters):
    """Halving rebuild of L_{i-1}..L_0 out of L_i.

    An element at 1-based position p of L_i belongs to every level
    i - v down to i - min(v, i) where v is the number of trailing
    zeros of p, so new tops follow directly from positions."""
    h = st[H]
    m = level_size[i]
    order = np.empty(m, dtype=np.int64)
    u = lnext[off[0] + (h - i)]
    idx = 0
    while u != NIL:
        order[idx] = u
        idx += 1
        u = lnext[off[u] + (h - i)]
    for pos in range(1, m + 1):
        v = 0
        p = pos
        while p % 2 == 0 and v < i:
            p >>= 1
            v += 1
        _set_top(rkey, top, off, cap, lnext, lkey, heads, st,
                 order[pos - 1], i - v, counters)
    touches = 0
    for j in range(i - 1, -1, -1):
        stride = 1 << (i - j)
        prev_slot = off[0] + (h - j)
        cnt = 0
        pos = stride - 1
        while pos < m:
            rid = order[pos]
            lnext[prev_slot] = rid
            lkey[prev_slot] = rkey[rid]
            prev_slot = off[rid] + (h - j)
            cnt += 1
            pos += stride
        lnext[prev_slot] = NIL
        # occupancy already moved by the _set_top calls above
        level_size[j] = cnt
        touches += cnt
    counters[TOUCHES] += touches
    counters[LREB] += i
    return touches


@kernel
def pk_partial_rebuild(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, eps, counters):
    h = st[H]
    i = h
    p = 1.0
    for j in range(1, h + 1):
        p *= 2.0 - eps
        if level_size[j] <= p:
            i = j
            break
    touches = pk_rebuild_from(rkey, top, off, cap, lnext, lkey, heads,
                              level_size, rfree, st, i, counters)
    return i, touches


@kernel
def _pk_prepend_level(rkey, top, off, cap, lnext, lkey, heads, level_size, st):
    # bottom-anchored slots make the relabeling free: every list keeps
    # its links, every span just sits one level deeper
    h = st[H]
    st[H] = h + 1
    _sent_resize(off, cap, lnext, lkey, heads, st, h + 2)
    lnext[off[0] + (h + 1)] = NIL  # fresh empty top level
    u = lnext[off[0] + 0]
    while u != NIL:
        top[u] += 1
        u = lnext[off[u] + 0]
    for j in range(h + 1, 0, -1):
        level_size[j] = level_size[j - 1]
    level_size[0] = 0


@kernel
def pk_grow(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, counters):
    """Rule 1 step: h += 1 and rebuild below the new bottom."""
    _pk_prepend_level(rkey, top, off, cap, lnext, lkey, heads, level_size, st)
    counters[GREB] += 1
    pk_rebuild_from(rkey, top, off, cap, lnext, lkey, heads, level_size,
                    rfree, st, st[H], counters)


@kernel
def pk_shrink(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, counters):
    """Rule 3.  Dropping the top level relabels old L_1 as the new
    L_0; the rebuild right after reassigns every span and capacity."""
    h = st[H]
    st[H] = h - 1
    st[SLOTS] -= level_size[0]
    u = lnext[off[0] + 0]
    while u != NIL:
        if top[u] > 0:
            top[u] -= 1
        u = lnext[off[u] + 0]
    for j in range(h):
        level_size[j] = level_size[j + 1]
    level_size[h] = 0
    _sent_resize(off, cap, lnext, lkey, heads, st, h)
    counters[GREB] += 1
    pk_rebuild_from(rkey, top, off, cap, lnext, lkey, heads, level_size,
                    rfree, st, h - 1, counters)


@kernel
def pk_slim(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, counters):
    counters[GREB] += 1
    pk_rebuild_from(rkey, top, off, cap, lnext, lkey, heads, level_size,
                    rfree, st, st[H], counters)


@kernel
def _pk_insert_rules(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, eps, counters):
    if level_size[0] > 1:
        pk_partial_rebuild(rkey, top, off, cap, lnext, lkey, heads,
                           level_size, rfree, st, eps, counters)
    if st[N] > _pow_ceil(2.0 - eps, st[H]):
        while st[N] > _pow_ceil(2.0 - eps, st[H]):
            _pk_prepend_level(rkey, top, off, cap, lnext, lkey, heads, level_size, st)
        counters[GREB] += 1
        pk_rebuild_from(rkey, top, off, cap, lnext, lkey, heads, level_size,
                        rfree, st, st[H], counters)
    if st[SLOTS] > SLIM_FACTOR * st[N]:
        pk_slim(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, counters)


@kernel
def _pk_delete_rules(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, eps, counters):
    if level_size[0] > 1:
        pk_partial_rebuild(rkey, top, off, cap, lnext, lkey, heads,
                           level_size, rfree, st, eps, counters)
    if st[H] >= 2 and st[N] < _pow_ceil(2.0 - eps, st[H] - 2):
        pk_shrink(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, counters)
    if st[SLOTS] > SLIM_FACTOR * st[N]:
        pk_slim(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, counters)


@kernel
def pk_insert(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, eps, x, counters, path):
    h = st[H]
    pk_search(rkey, top, off, cap, lnext, lkey, st, x, counters, path)
    u = path[h]
    s = off[u] + 0
    w = lnext[s]
    if w != NIL and not lt(x, lkey[s], counters):
        return False
    rid = _rec_alloc(rfree, st)
    rkey[rid] = x
    top[rid] = 0
    k, c = _class_of(h + 1)
    off[rid] = _blk_alloc(lnext, heads, st, k)
    cap[rid] = c
    st[CAPSUM] += c
    for lvl in range(h + 1):
        ps = off[path[lvl]] + (h - lvl)
        xs = off[rid] + (h - lvl)
        lnext[xs] = lnext[ps]
        lkey[xs] = lkey[ps]
        lnext[ps] = rid
        lkey[ps] = x
        level_size[lvl] += 1
    st[N] += 1
    st[SLOTS] += h + 1
    _pk_insert_rules(rkey, top, off, cap, lnext, lkey, heads, level_size,
                     rfree, st, eps, counters)
    return True


@kernel
def _rec_release(rkey, top, off, cap, lnext, lkey, heads, rfree, st, rid):
    k, _ = _class_of(cap[rid])
    _blk_free(lnext, heads, off[rid], k)
    st[CAPSUM] -= cap[rid]
    rfree[st[RFTOP]] = rid
    st[RFTOP] += 1


@kernel
def pk_delete(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, eps, x, counters, path):
    h = st[H]
    pk_search(rkey, top, off, cap, lnext, lkey, st, x, counters, path)
    u = path[h]
    s = off[u] + 0
    w = lnext[s]
    if w == NIL:
        return False
    if lt(x, lkey[s], counters):
        return False
    rid = np.int64(w)
    t = top[rid]
    for lvl in range(t, h + 1):
        ps = off[path[lvl]] + (h - lvl)
        xs = off[rid] + (h - lvl)
        lnext[ps] = lnext[xs]
        lkey[ps] = lkey[xs]
        level_size[lvl] -= 1
    st[SLOTS] -= h - t + 1
    st[N] -= 1
    _rec_release(rkey, top, off, cap, lnext, lkey, heads, rfree, st, rid)
    if st[N] == 0:
        st[H] = 0
        _sent_resize(off, cap, lnext, lkey, heads, st, 1)
        lnext[off[0]] = NIL
        for j in range(h + 1):
            level_size[j] = 0
        return True
    y = lnext[off[path[h]] + 0]
    if y != NIL:
        ty = top[y]
        if ty > 0:
            _set_top(rkey, top, off, cap, lnext, lkey, heads, st, y, 0, counters)
            yk = rkey[y]
            for lvl in range(ty):
                ps = off[path[lvl]] + (h - lvl)
                ys = off[y] + (h - lvl)
                lnext[ys] = lnext[ps]
                lkey[ys] = lkey[ps]
                lnext[ps] = y
                lkey[ps] = yk
                level_size[lvl] += 1
    _pk_delete_rules(rkey, top, off, cap, lnext, lkey, heads, level_size,
                     rfree, st, eps, counters)
    return True


@kernel
def pk_validate(rkey, top, off, cap, lnext, lkey, level_size, st, eps):
    h = st[H]
    n = st[N]
    if level_size[0] > 1:
        return 1
    total = 0
    for lvl in range(h + 1):
        s = off[0] + (h - lvl)
        u = lnext[s]
        cnt = 0
        prevk = np.int64(0)
        while u != NIL:
            if lkey[s] != rkey[u]:
                return 20
            if top[u] > lvl:
                return 21
            cnt += 1
            if cnt > 1 and rkey[u] <= prevk:
                return 2
            prevk = rkey[u]
            s = off[u] + (h - lvl)
            u = lnext[s]
        if cnt != level_size[lvl]:
            return 6
        total += cnt
    if total != st[SLOTS]:
        return 7
    if level_size[h] != n:
        return 5
    # spans, capacities and the factor-2 slot bound over live records
    capsum = 0
    heights = 0
    u = lnext[off[0] + 0]
    while u != NIL:
        hgt = h - top[u] + 1
        k = 1
        while k < hgt:
            k <<= 1
        if cap[u] != k:
            return 22
        capsum += cap[u]
        heights += hgt
        u = lnext[off[u] + 0]
    if capsum != st[CAPSUM]:
        return 23
    if heights != st[SLOTS]:
        return 25
    if capsum > 2 * st[SLOTS]:
        return 24
    for lvl in range(1, h + 1):
        a = lnext[off[0] + (h - (lvl - 1))]
        b = lnext[off[0] + (h - lvl)]
        prev_in = True
        while b != NIL:
            matched = a != NIL and a == b
            if matched:
                a = lnext[off[a] + (h - (lvl - 1))]
            elif a != NIL and rkey[a] < rkey[b]:
                return 3
            if not matched and not prev_in:
                return 4
            prev_in = matched
            b = lnext[off[b] + (h - lvl)]
        if a != NIL:
            return 3
    if n >= 2:
        if h > _height_ceil(2.0 - eps, n) + 1:
            return 8
        if n > _pow_ceil(2.0 - eps, h):
            return 10
    if n >= 1 and st[SLOTS] > SLIM_FACTOR * n:
        return 11
    return 0


@kernel
def pk_insert_many(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st, eps, xs, counters, path):
    added = 0
    for i in range(xs.shape[0]):
        if pk_insert(rkey, top, off, cap, lnext, lkey, heads, level_size,
                     rfree, st, eps, xs[i], counters, path):
            added += 1
    return added


@kernel
def pk_search_many(rkey, top, off, cap, lnext, lkey, st, xs, counters, path, out_comps):
    total = 0
    for i in range(xs.shape[0]):
        _, _, _, comps, _ = pk_search(rkey, top, off, cap, lnext, lkey, st,
                                      xs[i], counters, path)
        out_comps[i] = comps
        total += comps
    return total


@kernel
def pk_run_mixed(rkey, top, off, cap, lnext, lkey, heads, level_size, rfree, st,
                 eps, ops, xs, counters, path, validate_each, check_bounds):
    for i in range(ops.shape[0]):
        op = ops[i]
        x = xs[i]
        if op == 0:
            pk_insert(rkey, top, off, cap, lnext, lkey, heads, level_size,
                      rfree, st, eps, x, counters, path)
        elif op == 1:
            pk_delete(rkey, top, off, cap, lnext, lkey, heads, level_size,
                      rfree, st, eps, x, counters, path)
        else:
            _, _, _, comps, _ = pk_search(rkey, top, off, cap, lnext, lkey,
                                          st, x, counters, path)
            if check_bounds and comps > st[H] + 1:
                return 100, i
        if check_bounds and st[N] >= 2:
            if st[H] > _height_ceil(2.0 - eps, st[N]) + 1:
                return 101, i
        if validate_each:
            code = pk_validate(rkey, top, off, cap, lnext, lkey, level_size, st, eps)
            if code != 0:
                return code, i
    return 0, -1


class PackedTodoList:
    """Packed-record todolist; drop-in equivalent of :class:`TodoList`."""

    def __init__(self, epsilon, capacity=64):
        self.epsilon = check_epsilon(epsilon)
        rcap = max(64, int(capacity))
        lcap = 8 * rcap
        self._rkey = np.zeros(rcap, dtype=np.int64)
        self._top = np.zeros(rcap, dtype=np.int32)
        self._off = np.zeros(rcap, dtype=np.int64)
        self._cap = np.zeros(rcap, dtype=np.int32)
        self._rfree = np.zeros(rcap, dtype=np.int32)
        self._lnext = np.full(lcap, NIL, dtype=np.int32)
        self._lkey = np.zeros(lcap, dtype=np.int64)
        self._heads = np.full(N_CLASSES, NIL, dtype=np.int64)
        self._lsize = np.zeros(MAX_LEVELS, dtype=np.int64)
        self._st = np.zeros(PST_SIZE, dtype=np.int64)
        self._path = np.zeros(MAX_LEVELS, dtype=np.int64)
        self._counters = new_counters()
        self.stats = OpStats(self._counters)
        # record 0 is the sentinel: height 1 at birth
        self._st[RHWM] = 1
        self._st[LTOP] = 1
        self._cap[0] = 1
        self._off[0] = 0
        self._lnext[0] = NIL

    # -- bookkeeping ---------------------------------------------------

    @property
    def n(self):
        return int(self._st[N])

    @property
    def height(self):
        return int(self._st[H])

    @property
    def slot_count(self):
        return int(self._st[SLOTS])

    @property
    def link_capacity(self):
        """Total link slots currently allocated to element records."""
        return int(self._st[CAPSUM])

    def __len__(self):
        return self.n

    def _ensure_capacity(self, incoming=1):
        if self.height + 3 >= MAX_LEVELS:
            raise RuntimeError("height limit reached; epsilon too close to 1 for this size")
        worst_n = self.n + incoming
        rcap = self._rkey.shape[0]
        if int(self._st[RHWM]) + incoming + 2 > rcap:
            newr = rcap
            while int(self._st[RHWM]) + incoming + 2 > newr:
                newr *= 2
            for name, fill in (("_rkey", 0), ("_top", 0), ("_off", 0),
                               ("_cap", 0), ("_rfree", 0)):
                arr = getattr(self, name)
                grown = np.zeros(newr, dtype=arr.dtype)
                grown[: arr.shape[0]] = arr
                setattr(self, name, grown)
        # a rebuild can transiently hold old+new blocks for every record
        need = 8 * (worst_n + 2) + 16 * MAX_LEVELS
        lcap = self._lnext.shape[0]
        if int(self._st[LTOP]) + need > lcap:
            newl = lcap
            while int(self._st[LTOP]) + need > newl:
                newl *= 2
            grown = np.full(newl, NIL, dtype=np.int32)
            grown[:lcap] = self._lnext
            self._lnext = grown
            grownk = np.zeros(newl, dtype=np.int64)
            grownk[:lcap] = self._lkey
            self._lkey = grownk

    def _args(self):
        return (self._rkey, self._top, self._off, self._cap, self._lnext,
                self._lkey, self._heads, self._lsize, self._rfree, self._st)

    def _sargs(self):
        return (self._rkey, self._top, self._off, self._cap, self._lnext,
                self._lkey, self._st)

    # -- dictionary operations ------------------------------------------

    def find_predecessor(self, x):
        pk, has_pred, found, comps, _ = pk_search(
            *self._sargs(), np.int64(x), self._counters, self._path)
        return SearchOutcome(
            predecessor_key=int(pk) if has_pred else None,
            found=bool(found),
            comparisons=int(comps),
        )

    def contains(self, x):
        pk, has_pred, found, comps, has_succ = pk_search(
            *self._sargs(), np.int64(x), self._counters, self._path)
        if has_succ:
            self._counters[CMP] += 1
        return bool(found)

    def insert(self, x):
        self._ensure_capacity()
        return bool(pk_insert(*self._args(), self.epsilon, np.int64(x),
                              self._counters, self._path))

    def delete(self, x):
        self._ensure_capacity()
        return bool(pk_delete(*self._args(), self.epsilon, np.int64(x),
                              self._counters, self._path))

    def insert_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        self._ensure_capacity(incoming=xs.shape[0])
        return int(pk_insert_many(*self._args(), self.epsilon, xs,
                                  self._counters, self._path))

    def search_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        out = np.zeros(xs.shape[0], dtype=np.int64)
        total = pk_search_many(*self._sargs(), xs, self._counters,
                               self._path, out)
        return int(total), out

    # -- rebuild operations ----------------------------------------------

    def partial_rebuild(self):
        self._ensure_capacity()
        i, touches = pk_partial_rebuild(*self._args(), self.epsilon, self._counters)
        return {"levels_rebuilt": int(i), "touches": int(touches)}

    def tidy_grow(self):
        self._ensure_capacity()
        pk_grow(*self._args(), self._counters)

    def tidy_slim(self):
        self._ensure_capacity()
        pk_slim(*self._args(), self._counters)

    def tidy_shrink(self):
        if self.height < 1:
            raise RuntimeError("cannot shrink a height-0 structure")
        self._ensure_capacity()
        pk_shrink(*self._args(), self._counters)

    # -- debug / test support ----------------------------------------------

    def level_keys(self, lvl):
        if not (0 <= lvl <= self.height):
            raise IndexError(lvl)
        h = self.height
        out = []
        u = int(self._lnext[self._off[0] + (h - lvl)])
        while u != NIL:
            out.append(int(self._rkey[u]))
            u = int(self._lnext[self._off[u] + (h - lvl)])
        return out

    def keys(self):
        return self.level_keys(self.height)

    def level_sizes(self):
        return [int(self._lsize[j]) for j in range(self.height + 1)]

    def record_info(self, x):
        """(top_level, capacity, height) of the record storing x."""
        h = self.height
        u = int(self._lnext[self._off[0] + 0])
        while u != NIL:
            if int(self._rkey[u]) == x:
                t = int(self._top[u])
                return t, int(self._cap[u]), h - t + 1
            u = int(self._lnext[self._off[u] + 0])
        raise KeyError(x)

    def promote(self, x):
        """Extend x's record span to level 0, splicing it into every
        level it was missing from (the growth path rebuilds exercise).
        Returns (old_top, new_capacity)."""
        out = self.find_predecessor(x)
        if not out.found:
            raise KeyError(x)
        h = self.height
        self._ensure_capacity()
        pred = self._path[: h + 1].copy()
        rid = int(self._lnext[self._off[pred[h]] + 0])
        old_top = int(self._top[rid])
        if old_top > 0:
            _set_top(self._rkey, self._top, self._off, self._cap,
                     self._lnext, self._lkey, self._heads, self._st,
                     np.int64(rid), np.int64(0), self._counters)
            for lvl in range(old_top):
                ps = int(self._off[pred[lvl]]) + (h - lvl)
                xs = int(self._off[rid]) + (h - lvl)
                self._lnext[xs] = self._lnext[ps]
                self._lkey[xs] = self._lkey[ps]
                self._lnext[ps] = rid
                self._lkey[ps] = self._rkey[rid]
                self._lsize[lvl] += 1
        return old_top, int(self._cap[rid])

    def validate(self):
        code = int(pk_validate(self._rkey, self._top, self._off, self._cap,
                               self._lnext, self._lkey, self._lsize, self._st,
                               self.epsilon))
        if code != 0:
            raise InvariantViolation("%s (code %d)" % (_PERRORS.get(code, "?"), code))

    def run_mixed(self, ops, xs, validate_each=False, check_bounds=False):
        ops = np.ascontiguousarray(ops, dtype=np.int8)
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        distinct = len(np.unique(xs))
        self._ensure_capacity(incoming=distinct)
        code, idx = pk_run_mixed(*self._args(), self.epsilon, ops, xs,
                                 self._counters, self._path,
                                 validate_each, check_bounds)
        return int(code), int(idx)
