"""Comparison baselines behind the same counting instrumentation.

* :class:`SkipList` - classic randomized towers (p = 1/2), plain or
  with cached successor keys.  Both variants run the same comparison
  sequence; the cached one only dereferences a node when it advances,
  which is the whole difference the node-visit counter measures.
* :class:`SortedArray` - static binary search.
* :class:`StaticTree` - perfectly balanced search tree stored in
  pre-order, so a left-child step lands on the adjacent array slot.
"""

import math

import numpy as np

from ._accel import NIL, kernel
from .stats import ADJ, CMP, STEPS, VISITS, OpStats, SearchOutcome, lt, new_counters

MAX_TOWER = 64

# scalar state
SL_N = 0
SL_LEVEL = 1   # number of levels in use
SL_RHWM = 2
SL_RFTOP = 3
SL_LTOP = 4
SL_SIZE = 5


@kernel
def _sl_blk_alloc(snext, heads, st, hgt):
    b = np.int64(heads[hgt])
    if b != NIL:
        heads[hgt] = snext[b]
        return b
    b = st[SL_LTOP]
    if b + hgt > snext.shape[0]:
        raise RuntimeError("tower pool exhausted")
    st[SL_LTOP] += hgt
    return b


@kernel
def sl_search(rkey, hgt, off, snext, skey, st, x, counters, use_cache):
    """Pugh descent.  Returns (pred_key, has_pred, found, comps, has_succ).

    With ``use_cache`` the driving key comes from the current node's
    cached copy; without it the successor node is dereferenced for
    every comparison (counted as a visit even when the search then
    drops a level instead of advancing)."""
    u = np.int64(0)
    comps = 0
    counters[VISITS] += 1
    for lvl in range(st[SL_LEVEL] - 1, -1, -1):
        w = snext[off[u] + lvl]
        while w != NIL:
            comps += 1
            if use_cache:
                k = skey[off[u] + lvl]
            else:
                k = rkey[w]
                counters[VISITS] += 1
            if lt(k, x, counters):
                u = np.int64(w)
                if use_cache:
                    counters[VISITS] += 1
                w = snext[off[u] + lvl]
            else:
                break
    has_pred = u != 0
    pk = rkey[u] if has_pred else np.int64(0)
    s = off[u] + 0
    w = snext[s]
    found = w != NIL and skey[s] == x
    return pk, has_pred, found, comps, w != NIL


@kernel
def _sl_descend(rkey, hgt, off, snext, skey, st, x, counters, update, use_cache):
    u = np.int64(0)
    for lvl in range(st[SL_LEVEL] - 1, -1, -1):
        w = snext[off[u] + lvl]
        while w != NIL:
            if use_cache:
                k = skey[off[u] + lvl]
            else:
                k = rkey[w]
                counters[VISITS] += 1
            if lt(k, x, counters):
                u = np.int64(w)
                if use_cache:
                    counters[VISITS] += 1
                w = snext[off[u] + lvl]
            else:
                break
        update[lvl] = u
    return u


@kernel
def sl_insert(rkey, hgt, off, snext, skey, heads, rfree, st, x, new_height,
              counters, update, use_cache):
    u = _sl_descend(rkey, hgt, off, snext, skey, st, x, counters, update, use_cache)
    s = off[u] + 0
    w = snext[s]
    if w != NIL and not lt(x, skey[s], counters):
        return False
    level = st[SL_LEVEL]
    if new_height > level:
        for lvl in range(level, new_height):
            update[lvl] = 0
        st[SL_LEVEL] = new_height
    if st[SL_RFTOP] > 0:
        st[SL_RFTOP] -= 1
        rid = np.int64(rfree[st[SL_RFTOP]])
    else:
        rid = st[SL_RHWM]
        if rid >= rkey.shape[0]:
            raise RuntimeError("record pool exhausted")
        st[SL_RHWM] += 1
    rkey[rid] = x
    hgt[rid] = new_height
    off[rid] = _sl_blk_alloc(snext, heads, st, new_height)
    for lvl in range(new_height):
        ps = off[update[lvl]] + lvl
        s = off[rid] + lvl
        snext[s] = snext[ps]
        skey[s] = skey[ps]
        snext[ps] = rid
        skey[ps] = x
    st[SL_N] += 1
    return True


@kernel
def sl_delete(rkey, hgt, off, snext, skey, heads, rfree, st, x, counters, update, use_cache):
    u = _sl_descend(rkey, hgt, off, snext, skey, st, x, counters, update, use_cache)
    s = off[u] + 0
    w = snext[s]
    if w == NIL:
        return False
    if lt(x, skey[s], counters):
        return False
    rid = np.int64(w)
    for lvl in range(hgt[rid]):
        ps = off[update[lvl]] + lvl
        if snext[ps] == rid:
            snext[ps] = snext[off[rid] + lvl]
            skey[ps] = skey[off[rid] + lvl]
    # recycle the tower
    snext[off[rid]] = heads[hgt[rid]]
    heads[hgt[rid]] = off[rid]
    rfree[st[SL_RFTOP]] = rid
    st[SL_RFTOP] += 1
    st[SL_N] -= 1
    while st[SL_LEVEL] > 1 and snext[off[0] + (st[SL_LEVEL] - 1)] == NIL:
        st[SL_LEVEL] -= 1
    return True


@kernel
def sl_insert_many(rkey, hgt, off, snext, skey, heads, rfree, st, xs, heights,
                   counters, update, use_cache):
    added = 0
    for i in range(xs.shape[0]):
        if sl_insert(rkey, hgt, off, snext, skey, heads, rfree, st, xs[i],
                     heights[i], counters, update, use_cache):
            added += 1
    return added


@kernel
def sl_search_many(rkey, hgt, off, snext, skey, st, xs, counters, out_comps, use_cache):
    total = 0
    for i in range(xs.shape[0]):
        _, _, _, comps, _ = sl_search(rkey, hgt, off, snext, skey, st, xs[i],
                                      counters, use_cache)
        out_comps[i] = comps
        total += comps
    return total


class SkipList:
    """Seeded randomized skiplist; ``cached=True`` keeps successor keys
    inside each tower slot the way the packed todolist engine does."""

    def __init__(self, seed=0, cached=False, capacity=64):
        self.cached = bool(cached)
        self.seed = int(seed)
        self._rng = np.random.Generator(np.random.PCG64(self.seed))
        rcap = max(64, int(capacity))
        self._rkey = np.zeros(rcap, dtype=np.int64)
        self._hgt = np.zeros(rcap, dtype=np.int32)
        self._off = np.zeros(rcap, dtype=np.int64)
        self._rfree = np.zeros(rcap, dtype=np.int32)
        lcap = 4 * rcap + MAX_TOWER
        self._snext = np.full(lcap, NIL, dtype=np.int32)
        self._skey = np.zeros(lcap, dtype=np.int64)
        self._heads = np.full(MAX_TOWER + 1, NIL, dtype=np.int64)
        self._st = np.zeros(SL_SIZE, dtype=np.int64)
        self._update = np.zeros(MAX_TOWER, dtype=np.int64)
        self._counters = new_counters()
        self.stats = OpStats(self._counters)
        # sentinel tower spans every possible level
        self._hgt[0] = MAX_TOWER
        self._st[SL_RHWM] = 1
        self._st[SL_LTOP] = MAX_TOWER
        self._st[SL_LEVEL] = 1

    @property
    def n(self):
        return int(self._st[SL_N])

    def __len__(self):
        return self.n

    def _height_cap(self, n=None):
        n = self.n if n is None else n
        return min(MAX_TOWER - 1, int(math.log2(max(n, 2))) + 5)

    def _draw_height(self):
        return int(min(self._rng.geometric(0.5), self._height_cap()))

    def _ensure(self, incoming=1):
        rcap = self._rkey.shape[0]
        if int(self._st[SL_RHWM]) + incoming + 2 > rcap:
            newr = rcap
            while int(self._st[SL_RHWM]) + incoming + 2 > newr:
                newr *= 2
            for name in ("_rkey", "_hgt", "_off", "_rfree"):
                arr = getattr(self, name)
                grown = np.zeros(newr, dtype=arr.dtype)
                grown[: arr.shape[0]] = arr
                setattr(self, name, grown)
        lcap = self._snext.shape[0]
        need = 3 * incoming + MAX_TOWER
        if int(self._st[SL_LTOP]) + need > lcap:
            newl = lcap
            while int(self._st[SL_LTOP]) + need > newl:
                newl *= 2
            grown = np.full(newl, NIL, dtype=np.int32)
            grown[:lcap] = self._snext
            self._snext = grown
            grownk = np.zeros(newl, dtype=np.int64)
            grownk[:lcap] = self._skey
            self._skey = grownk

    def _sargs(self):
        return (self._rkey, self._hgt, self._off, self._snext, self._skey, self._st)

    def _margs(self):
        return (self._rkey, self._hgt, self._off, self._snext, self._skey,
                self._heads, self._rfree, self._st)

    def find_predecessor(self, x):
        pk, has_pred, found, comps, _ = sl_search(
            *self._sargs(), np.int64(x), self._counters, self.cached)
        return SearchOutcome(
            predecessor_key=int(pk) if has_pred else None,
            found=bool(found),
            comparisons=int(comps),
        )

    def contains(self, x):
        pk, has_pred, found, comps, has_succ = sl_search(
            *self._sargs(), np.int64(x), self._counters, self.cached)
        if has_succ:
            self._counters[CMP] += 1
        return bool(found)

    def insert(self, x):
        self._ensure()
        h = self._draw_height()
        return bool(sl_insert(*self._margs(), np.int64(x), h,
                              self._counters, self._update, self.cached))

    def delete(self, x):
        return bool(sl_delete(*self._margs(), np.int64(x),
                              self._counters, self._update, self.cached))

    def insert_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        self._ensure(incoming=xs.shape[0])
        cap = self._height_cap(self.n + xs.shape[0])
        heights = np.minimum(self._rng.geometric(0.5, size=xs.shape[0]),
                             cap).astype(np.int64)
        return int(sl_insert_many(*self._margs(), xs, heights,
                                  self._counters, self._update, self.cached))

    def search_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        out = np.zeros(xs.shape[0], dtype=np.int64)
        total = sl_search_many(*self._sargs(), xs, self._counters, out, self.cached)
        return int(total), out

    def keys(self):
        out = []
        u = int(self._snext[self._off[0]])
        while u != NIL:
            out.append(int(self._rkey[u]))
            u = int(self._snext[self._off[u]])
        return out

    def tower_heights(self):
        """key -> tower height, in key order (deterministic per seed)."""
        out = []
        u = int(self._snext[self._off[0]])
        while u != NIL:
            out.append((int(self._rkey[u]), int(self._hgt[u])))
            u = int(self._snext[self._off[u]])
        return out

    def validate(self):
        ks = self.keys()
        assert ks == sorted(set(ks)), "bottom level corrupt"
        assert len(ks) == self.n
        for lvl in range(int(self._st[SL_LEVEL])):
            u = int(self._snext[self._off[0] + lvl])
            prev = None
            while u != NIL:
                k = int(self._rkey[u])
                assert prev is None or k > prev
                assert int(self._hgt[u]) > lvl
                s = int(self._off[u]) + lvl
                w = int(self._snext[s])
                if w != NIL:
                    assert int(self._skey[s]) == int(self._rkey[w]), "cached key stale"
                prev = k
                u = w


@kernel
def arr_search(a, x, counters):
    """Binary predecessor search: (pred_idx, comps, found, has_succ)."""
    lo = 0
    hi = a.shape[0]
    comps = 0
    while lo < hi:
        mid = (lo + hi) // 2
        comps += 1
        if lt(a[mid], x, counters):
            lo = mid + 1
        else:
            hi = mid
    counters[VISITS] += comps + 1
    found = lo < a.shape[0] and a[lo] == x
    return lo - 1, comps, found, lo < a.shape[0]


@kernel
def arr_search_many(a, xs, counters, out_comps):
    total = 0
    for i in range(xs.shape[0]):
        _, comps, _, _ = arr_search(a, xs[i], counters)
        out_comps[i] = comps
        total += comps
    return total


class SortedArray:
    """Static sorted-array dictionary (mutation rejected)."""

    def __init__(self, keys=()):
        a = np.asarray(sorted(set(int(k) for k in keys)), dtype=np.int64)
        self._a = a
        self._counters = new_counters()
        self.stats = OpStats(self._counters)

    @classmethod
    def from_sorted(cls, arr):
        obj = cls.__new__(cls)
        obj._a = np.ascontiguousarray(arr, dtype=np.int64)
        if obj._a.shape[0] > 1 and not (np.diff(obj._a) > 0).all():
            raise ValueError("build input must be sorted and distinct")
        obj._counters = new_counters()
        obj.stats = OpStats(obj._counters)
        return obj

    @property
    def n(self):
        return int(self._a.shape[0])

    def insert(self, x):
        raise TypeError("static structure: mutation not supported")

    delete = insert

    def find_predecessor(self, x):
        idx, comps, found, _ = arr_search(self._a, np.int64(x), self._counters)
        return SearchOutcome(
            predecessor_key=int(self._a[idx]) if idx >= 0 else None,
            found=bool(found),
            comparisons=int(comps),
        )

    def contains(self, x):
        idx, comps, found, has_succ = arr_search(self._a, np.int64(x), self._counters)
        if has_succ:
            self._counters[CMP] += 1
        return bool(found)

    def search_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        out = np.zeros(xs.shape[0], dtype=np.int64)
        total = arr_search_many(self._a, xs, self._counters, out)
        return int(total), out


@kernel
def tree_search(tkey, left, right, x, counters):
    """One comparison per node; tracks storage adjacency of each step."""
    node = np.int64(0)
    pred = np.int64(NIL)
    ceil_cand = np.int64(NIL)
    comps = 0
    if tkey.shape[0] == 0:
        return pred, comps, False, False
    counters[VISITS] += 1
    while node != NIL:
        comps += 1
        if lt(tkey[node], x, counters):
            pred = node
            child = np.int64(right[node])
        else:
            ceil_cand = node
            child = np.int64(left[node])
        if child != NIL:
            counters[VISITS] += 1
            counters[STEPS] += 1
            if child == node + 1:
                counters[ADJ] += 1
        node = child
    found = ceil_cand != NIL and tkey[ceil_cand] == x
    return pred, comps, found, ceil_cand != NIL


@kernel
def tree_search_many(tkey, left, right, xs, counters, out_comps):
    total = 0
    for i in range(xs.shape[0]):
        _, comps, _, _ = tree_search(tkey, left, right, xs[i], counters)
        out_comps[i] = comps
        total += comps
    return total


class StaticTree:
    """Perfectly balanced BST laid out in pre-order (left child adjacent)."""

    def __init__(self, keys=()):
        a = sorted(set(int(k) for k in keys))
        self._build(a)

    @classmethod
    def from_sorted(cls, arr):
        a = [int(v) for v in arr]
        if any(a[i] >= a[i + 1] for i in range(len(a) - 1)):
            raise ValueError("build input must be sorted and distinct")
        obj = cls.__new__(cls)
        obj._build(a)
        return obj

    def _build(self, a):
        n = len(a)
        self._tkey = np.zeros(n, dtype=np.int64)
        self._left = np.full(n, NIL, dtype=np.int32)
        self._right = np.full(n, NIL, dtype=np.int32)
        self._counters = new_counters()
        self.stats = OpStats(self._counters)
        # iterative pre-order so paper-scale builds don't hit the
        # recursion limit
        if n == 0:
            return
        nid = 0
        stack = [(0, n, -1, False)]  # lo, hi, parent, is_right
        while stack:
            lo, hi, parent, is_right = stack.pop()
            mid = (lo + hi) // 2
            me = nid
            nid += 1
            self._tkey[me] = a[mid]
            if parent >= 0:
                if is_right:
                    self._right[parent] = me
                else:
                    self._left[parent] = me
            # push right first so the left subtree is laid out adjacent
            if mid + 1 < hi:
                stack.append((mid + 1, hi, me, True))
            if lo < mid:
                stack.append((lo, mid, me, False))

    @property
    def n(self):
        return int(self._tkey.shape[0])

    def insert(self, x):
        raise TypeError("static structure: mutation not supported")

    delete = insert

    def depth(self):
        d = 0
        stack = [(0, 1)] if self.n else []
        while stack:
            node, dep = stack.pop()
            d = max(d, dep)
            for c in (int(self._left[node]), int(self._right[node])):
                if c != NIL:
                    stack.append((c, dep + 1))
        return d

    @property
    def root_key(self):
        return int(self._tkey[0]) if self.n else None

    def find_predecessor(self, x):
        pred, comps, found, _ = tree_search(self._tkey, self._left, self._right,
                                            np.int64(x), self._counters)
        return SearchOutcome(
            predecessor_key=int(self._tkey[pred]) if pred != NIL else None,
            found=bool(found),
            comparisons=int(comps),
        )

    def contains(self, x):
        pred, comps, found, has_ceil = tree_search(self._tkey, self._left, self._right,
                                                   np.int64(x), self._counters)
        if has_ceil:
            self._counters[CMP] += 1
        return bool(found)

    def search_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        out = np.zeros(xs.shape[0], dtype=np.int64)
        total = tree_search_many(self._tkey, self._left, self._right, xs,
                                 self._counters, out)
        return int(total), out
