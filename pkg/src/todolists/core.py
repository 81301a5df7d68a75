"""Reference todolist: nested singly-linked sorted lists L_0..L_h.

Level 0 is the top (at most one key); level h is the bottom and holds
every stored key.  Each keyed node carries ``next`` (same level) and
``down`` (its occurrence one level below).  Searches descend from the
top sentinel doing at most one key comparison per level.  Inserts
splice into every level and restore ``|L_0| <= 1`` by halving partial
rebuilds; three global rules adjust the height and total size.

Storage is struct-of-arrays (int64 keys, int32 links) so the hot
kernels compile under numba and run unchanged on the pure-Python
backend.
"""

import math

import numpy as np

from ._accel import NIL, kernel
from .stats import CMP, GREB, LREB, TOUCHES, VISITS, OpStats, SearchOutcome, lt, new_counters

MAX_LEVELS = 512

# scalar-state slots
H = 0       # level count minus one
N = 1       # stored keys
SLOTS = 2   # keyed-node occurrences across all levels
HWM = 3     # node-pool high-water mark
FTOP = 4    # free-stack height
ST_SIZE = 5

SLIM_FACTOR = 3  # c in global-rebuild rule 2 (paper requires c > 2)

# validator error codes
_ERRORS = {
    1: "property 1 violated: |L_0| > 1",
    2: "level not strictly sorted",
    3: "property 2 violated: level is not a subset of the level below / bad down link",
    4: "property 3 violated: two consecutive elements absent from the level above",
    5: "property 4 violated: bottom level count != n",
    6: "level_size bookkeeping mismatch",
    7: "slot_count bookkeeping mismatch",
    8: "height above ceil(log_{2-eps} n) + 1",
    10: "rest-state size bound n <= ceil((2-eps)^h) violated",
    11: "slot_count > c*n at rest",
}


class InvariantViolation(AssertionError):
    """A structural invariant failed a validation walk."""


@kernel
def _pow_ceil(base, e):
    # ceil(base**e) by iterated multiplication; ties on the float value
    # deliberately round the same way everywhere.
    p = 1.0
    for _ in range(e):
        p *= base
    return math.ceil(p)


@kernel
def _height_ceil(base, n):
    # ceil(log_base n)
    return math.ceil(math.log(n) / math.log(base))


@kernel
def _alloc(free, st):
    if st[FTOP] > 0:
        st[FTOP] -= 1
        return np.int64(free[st[FTOP]])
    nid = st[HWM]
    if nid >= free.shape[0]:
        raise RuntimeError("node pool exhausted")
    st[HWM] += 1
    return nid


@kernel
def _release(free, st, nid):
    free[st[FTOP]] = nid
    st[FTOP] += 1


@kernel
def _descend(key, nxt, down, sent, h, x, counters, path):
    """Top-down predecessor descent; fills path[0..h] with the
    per-level predecessor node and returns (comparisons, advances)."""
    u = np.int64(sent[0])
    comps = 0
    adv = 0
    for lvl in range(h + 1):
        w = nxt[u]
        if w != NIL:
            comps += 1
            if lt(key[w], x, counters):
                u = np.int64(w)
                adv += 1
        path[lvl] = u
        if lvl < h:
            u = np.int64(down[u])
    counters[VISITS] += 1 + comps
    return comps, adv


@kernel
def tdl_search(key, nxt, down, sent, st, x, counters, path):
    """Returns (pred_key, has_pred, found, comparisons, has_succ).

    ``found`` is implied by the final successor being >= x (property 3
    makes the descent end at the true predecessor), so it costs no
    extra counted comparison here; ``contains`` charges one.
    """
    h = st[H]
    comps, _ = _descend(key, nxt, down, sent, h, x, counters, path)
    u = path[h]
    has_pred = u != sent[h]
    pk = key[u] if has_pred else np.int64(0)
    w = nxt[u]
    found = w != NIL and key[w] == x
    return pk, has_pred, found, comps, w != NIL


@kernel
def _free_level(key, nxt, down, sent, level_size, free, st, lvl):
    u = nxt[sent[lvl]]
    while u != NIL:
        w = nxt[u]
        _release(free, st, u)
        u = w
    nxt[sent[lvl]] = NIL
    st[SLOTS] -= level_size[lvl]
    level_size[lvl] = 0


@kernel
def tdl_rebuild_from(key, nxt, down, sent, level_size, free, st, i, counters):
    """Rebuild L_{i-1}..L_0 by halving: L_{j} takes every second
    element of L_{j+1}, starting with the second."""
    for j in range(i):
        _free_level(key, nxt, down, sent, level_size, free, st, j)
    touches = 0
    for j in range(i - 1, -1, -1):
        src = nxt[sent[j + 1]]
        tail = np.int64(sent[j])
        cnt = 0
        pos = 0
        while src != NIL:
            pos += 1
            if pos % 2 == 0:
                nid = _alloc(free, st)
                key[nid] = key[src]
                down[nid] = src
                nxt[nid] = NIL
                nxt[tail] = nid
                tail = nid
                cnt += 1
            src = nxt[src]
        level_size[j] = cnt
        st[SLOTS] += cnt
        touches += cnt
    counters[TOUCHES] += touches
    counters[LREB] += i
    return touches


@kernel
def tdl_partial_rebuild(key, nxt, down, sent, level_size, free, st, eps, counters):
    """Find the smallest index i with |L_i| <= (2-eps)^i and rebuild
    everything above it.  i = h is a valid fallback: rest states allow
    n = ceil((2-eps)^h) to sit just above the fractional power, and
    halving from L_h still lands |L_0| <= 1 because n <= 2^h."""
    h = st[H]
    i = h
    p = 1.0
    for j in range(1, h + 1):
        p *= 2.0 - eps
        if level_size[j] <= p:
            i = j
            break
    touches = tdl_rebuild_from(key, nxt, down, sent, level_size, free, st, i, counters)
    return i, touches


@kernel
def _prepend_level(key, nxt, down, sent, level_size, free, st):
    # a fresh empty top level; the old bottom keeps its nodes and
    # simply becomes one level deeper
    h = st[H]
    nid = _alloc(free, st)
    nxt[nid] = NIL
    down[nid] = sent[0]
    for j in range(h + 1, 0, -1):
        sent[j] = sent[j - 1]
        level_size[j] = level_size[j - 1]
    sent[0] = nid
    level_size[0] = 0
    st[H] = h + 1


@kernel
def tdl_grow(key, nxt, down, sent, level_size, free, st, counters):
    """Global rule 1 step: h += 1, then regenerate everything below
    the (relabeled) bottom by halving."""
    _prepend_level(key, nxt, down, sent, level_size, free, st)
    counters[GREB] += 1
    tdl_rebuild_from(key, nxt, down, sent, level_size, free, st, st[H], counters)


@kernel
def tdl_shrink(key, nxt, down, sent, level_size, free, st, counters):
    """Global rule 3: h -= 1 by dropping the top level."""
    h = st[H]
    _free_level(key, nxt, down, sent, level_size, free, st, 0)
    _release(free, st, sent[0])
    for j in range(h):
        sent[j] = sent[j + 1]
        level_size[j] = level_size[j + 1]
    st[H] = h - 1
    counters[GREB] += 1
    tdl_rebuild_from(key, nxt, down, sent, level_size, free, st, h - 1, counters)


@kernel
def tdl_slim(key, nxt, down, sent, level_size, free, st, counters):
    """Global rule 2: regenerate L_0..L_{h-1} from the bottom level."""
    counters[GREB] += 1
    tdl_rebuild_from(key, nxt, down, sent, level_size, free, st, st[H], counters)


@kernel
def _apply_insert_rules(key, nxt, down, sent, level_size, free, st, eps, counters):
    if level_size[0] > 1:
        tdl_partial_rebuild(key, nxt, down, sent, level_size, free, st, eps, counters)
    if st[N] > _pow_ceil(2.0 - eps, st[H]):
        # consecutive ceilings can coincide for large eps, so raise h
        # until the size bound holds again, then rebuild once
        while st[N] > _pow_ceil(2.0 - eps, st[H]):
            _prepend_level(key, nxt, down, sent, level_size, free, st)
        counters[GREB] += 1
        tdl_rebuild_from(key, nxt, down, sent, level_size, free, st, st[H], counters)
    if st[SLOTS] > SLIM_FACTOR * st[N]:
        tdl_slim(key, nxt, down, sent, level_size, free, st, counters)


@kernel
def _apply_delete_rules(key, nxt, down, sent, level_size, free, st, eps, counters):
    if level_size[0] > 1:
        tdl_partial_rebuild(key, nxt, down, sent, level_size, free, st, eps, counters)
    if st[H] >= 2 and st[N] < _pow_ceil(2.0 - eps, st[H] - 2):
        tdl_shrink(key, nxt, down, sent, level_size, free, st, counters)
    if st[SLOTS] > SLIM_FACTOR * st[N]:
        tdl_slim(key, nxt, down, sent, level_size, free, st, counters)


@kernel
def tdl_insert(key, nxt, down, sent, level_size, free, st, eps, x, counters, path):
    h = st[H]
    _descend(key, nxt, down, sent, h, x, counters, path)
    u = path[h]
    w = nxt[u]
    if w != NIL and not lt(x, key[w], counters):
        return False  # x == key[w]: duplicate (successor >= x structurally)
    below = np.int64(NIL)
    for lvl in range(h, -1, -1):
        nid = _alloc(free, st)
        key[nid] = x
        down[nid] = below
        nxt[nid] = nxt[path[lvl]]
        nxt[path[lvl]] = nid
        level_size[lvl] += 1
        below = nid
    st[N] += 1
    st[SLOTS] += h + 1
    _apply_insert_rules(key, nxt, down, sent, level_size, free, st, eps, counters)
    return True


@kernel
def tdl_delete(key, nxt, down, sent, level_size, free, st, eps, x, counters, path, aux):
    h = st[H]
    _descend(key, nxt, down, sent, h, x, counters, path)
    u = path[h]
    w = nxt[u]
    if w == NIL:
        return False
    if lt(x, key[w], counters):
        return False  # successor > x: absent
    # x occupies a contiguous span of levels [t, h]; locate it by
    # pointer identity (no key comparisons).
    t = h
    aux[h] = w
    for lvl in range(h - 1, -1, -1):
        cand = nxt[path[lvl]]
        if cand != NIL and down[cand] == aux[lvl + 1]:
            aux[lvl] = cand
            t = lvl
        else:
            break
    for lvl in range(t, h + 1):
        nxt[path[lvl]] = nxt[aux[lvl]]
        _release(free, st, aux[lvl])
        level_size[lvl] -= 1
    st[SLOTS] -= h - t + 1
    st[N] -= 1
    if st[N] == 0:
        while st[H] > 0:
            _release(free, st, sent[0])
            hh = st[H]
            for j in range(hh):
                sent[j] = sent[j + 1]
                level_size[j] = level_size[j + 1]
            st[H] = hh - 1
        return True
    # promote x's successor into every level it is missing from; this
    # repairs all possible property-3 violations (no promotion needed
    # when x was the maximum).
    ynode = nxt[path[h]]
    if ynode != NIL:
        ty = h
        aux[h] = ynode
        for lvl in range(h - 1, -1, -1):
            cand = nxt[path[lvl]]
            if cand != NIL and down[cand] == aux[lvl + 1]:
                aux[lvl] = cand
                ty = lvl
            else:
                break
        below = aux[ty]
        yk = key[ynode]
        for lvl in range(ty - 1, -1, -1):
            nid = _alloc(free, st)
            key[nid] = yk
            down[nid] = below
            nxt[nid] = nxt[path[lvl]]
            nxt[path[lvl]] = nid
            level_size[lvl] += 1
            below = nid
        st[SLOTS] += ty
    _apply_delete_rules(key, nxt, down, sent, level_size, free, st, eps, counters)
    return True


@kernel
def tdl_validate(key, nxt, down, sent, level_size, st, eps):
    """Full structural walk; returns 0 or an error code."""
    h = st[H]
    n = st[N]
    if level_size[0] > 1:
        return 1
    total = 0
    for lvl in range(h + 1):
        u = nxt[sent[lvl]]
        cnt = 0
        prevk = np.int64(0)
        while u != NIL:
            cnt += 1
            if cnt > 1 and key[u] <= prevk:
                return 2
            prevk = key[u]
            if lvl < h:
                d = down[u]
                if d == NIL or key[d] != key[u]:
                    return 3
            elif down[u] != NIL:
                return 3
            u = nxt[u]
        if cnt != level_size[lvl]:
            return 6
        total += cnt
    if total != st[SLOTS]:
        return 7
    if level_size[h] != n:
        return 5
    for lvl in range(1, h + 1):
        a = nxt[sent[lvl - 1]]
        b = nxt[sent[lvl]]
        prev_in = True
        while b != NIL:
            matched = a != NIL and key[a] == key[b]
            if matched:
                if down[a] != b:
                    return 3
                a = nxt[a]
            elif a != NIL and key[a] < key[b]:
                return 3
            if not matched and not prev_in:
                return 4
            prev_in = matched
            b = nxt[b]
        if a != NIL:
            return 3
    if n >= 2:
        if h > _height_ceil(2.0 - eps, n) + 1:
            return 8
        # the exact lower-bound form rule 1 maintains (the ceiling in
        # the trigger can sit well below ceil(log_{2-eps} n) at big eps)
        if n > _pow_ceil(2.0 - eps, h):
            return 10
    if n >= 1 and st[SLOTS] > SLIM_FACTOR * n:
        return 11
    return 0


@kernel
def tdl_insert_many(key, nxt, down, sent, level_size, free, st, eps, xs, counters, path):
    added = 0
    for i in range(xs.shape[0]):
        if tdl_insert(key, nxt, down, sent, level_size, free, st, eps, xs[i], counters, path):
            added += 1
    return added


@kernel
def tdl_search_many(key, nxt, down, sent, st, xs, counters, path, out_comps):
    total = 0
    for i in range(xs.shape[0]):
        _, _, _, comps, _ = tdl_search(key, nxt, down, sent, st, xs[i], counters, path)
        out_comps[i] = comps
        total += comps
    return total


@kernel
def tdl_run_mixed(key, nxt, down, sent, level_size, free, st, eps, ops, xs,
                  counters, path, aux, validate_each, check_bounds):
    """Drive a mixed op sequence (0=insert, 1=delete, 2=search) with
    optional per-op validation and per-search comparison-bound checks.
    Returns (error_code, op_index); 100 = search exceeded h+1
    comparisons, 101 = height bound broke, else validator codes."""
    for i in range(ops.shape[0]):
        op = ops[i]
        x = xs[i]
        if op == 0:
            tdl_insert(key, nxt, down, sent, level_size, free, st, eps, x, counters, path)
        elif op == 1:
            tdl_delete(key, nxt, down, sent, level_size, free, st, eps, x, counters, path, aux)
        else:
            _, _, _, comps, _ = tdl_search(key, nxt, down, sent, st, x, counters, path)
            if check_bounds and comps > st[H] + 1:
                return 100, i
        if check_bounds and st[N] >= 2:
            if st[H] > _height_ceil(2.0 - eps, st[N]) + 1:
                return 101, i
        if validate_each:
            code = tdl_validate(key, nxt, down, sent, level_size, st, eps)
            if code != 0:
                return code, i
    return 0, -1


def check_epsilon(epsilon):
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie strictly inside (0, 1), got %r" % (epsilon,))
    return float(epsilon)


class TodoList:
    """Ordered integer set with top-down search and partial rebuilding."""

    def __init__(self, epsilon, capacity=64):
        self.epsilon = check_epsilon(epsilon)
        cap = max(64, int(capacity))
        self._key = np.zeros(cap, dtype=np.int64)
        self._nxt = np.full(cap, NIL, dtype=np.int32)
        self._down = np.full(cap, NIL, dtype=np.int32)
        self._free = np.zeros(cap, dtype=np.int32)
        self._sent = np.full(MAX_LEVELS, NIL, dtype=np.int32)
        self._lsize = np.zeros(MAX_LEVELS, dtype=np.int64)
        self._st = np.zeros(ST_SIZE, dtype=np.int64)
        self._path = np.zeros(MAX_LEVELS, dtype=np.int64)
        self._aux = np.zeros(MAX_LEVELS, dtype=np.int64)
        self._counters = new_counters()
        self.stats = OpStats(self._counters)
        self._st[HWM] = 1  # node 0 is the level-0 sentinel
        self._sent[0] = 0

    # -- bookkeeping -------------------------------------------------

    @property
    def n(self):
        return int(self._st[N])

    @property
    def height(self):
        return int(self._st[H])

    @property
    def slot_count(self):
        return int(self._st[SLOTS])

    def __len__(self):
        return self.n

    def _capacity(self):
        return self._key.shape[0]

    def _available(self):
        return self._capacity() - int(self._st[HWM]) + int(self._st[FTOP])

    def _grow_pool(self, need):
        cap = self._capacity()
        newcap = cap
        while newcap - cap + self._available() < need:
            newcap *= 2
        grown_key = np.zeros(newcap, dtype=np.int64)
        grown_key[:cap] = self._key
        self._key = grown_key
        for name in ("_nxt", "_down", "_free"):
            arr = getattr(self, name)
            grown = np.full(newcap, NIL, dtype=np.int32)
            grown[:cap] = arr
            setattr(self, name, grown)

    def _ensure_capacity(self):
        if self.height + 3 >= MAX_LEVELS:
            raise RuntimeError("height limit reached; epsilon too close to 1 for this size")
        # one op allocates at most: splice h+2, promotion h, plus a full
        # halving rebuild below the bottom (< n + h).
        need = self.n + 4 * self.height + 16
        if self._available() < need:
            self._grow_pool(need)

    def _args(self):
        return self._key, self._nxt, self._down, self._sent, self._lsize, self._free, self._st

    # -- dictionary operations ----------------------------------------

    def find_predecessor(self, x):
        pk, has_pred, found, comps, _ = tdl_search(
            self._key, self._nxt, self._down, self._sent, self._st,
            np.int64(x), self._counters, self._path)
        return SearchOutcome(
            predecessor_key=int(pk) if has_pred else None,
            found=bool(found),
            comparisons=int(comps),
        )

    def contains(self, x):
        pk, has_pred, found, comps, has_succ = tdl_search(
            self._key, self._nxt, self._down, self._sent, self._st,
            np.int64(x), self._counters, self._path)
        if has_succ:
            # the descent leaves successor >= x, so one comparison
            # resolves membership
            self._counters[CMP] += 1
        return bool(found)

    def insert(self, x):
        self._ensure_capacity()
        return bool(tdl_insert(*self._args(), self.epsilon, np.int64(x),
                               self._counters, self._path))

    def delete(self, x):
        self._ensure_capacity()
        return bool(tdl_delete(*self._args(), self.epsilon, np.int64(x),
                               self._counters, self._path, self._aux))

    def insert_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        # worst case every key is new
        need = (self.n + xs.shape[0]) * (SLIM_FACTOR + 1) + 8 * MAX_LEVELS
        if self._available() < need:
            self._grow_pool(need)
        if self.height + int(math.log2(self.n + xs.shape[0] + 2) / math.log2(2 - self.epsilon)) + 4 >= MAX_LEVELS:
            raise RuntimeError("bulk insert would exceed the height limit")
        return int(tdl_insert_many(*self._args(), self.epsilon, xs,
                                   self._counters, self._path))

    def search_many(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        out = np.zeros(xs.shape[0], dtype=np.int64)
        total = tdl_search_many(self._key, self._nxt, self._down, self._sent,
                                self._st, xs, self._counters, self._path, out)
        return int(total), out

    # -- rebuild operations (normally fired by the rules) --------------

    def partial_rebuild(self):
        self._ensure_capacity()
        i, touches = tdl_partial_rebuild(*self._args(), self.epsilon, self._counters)
        return {"levels_rebuilt": int(i), "touches": int(touches)}

    def tidy_grow(self):
        self._ensure_capacity()
        tdl_grow(*self._args(), self._counters)

    def tidy_slim(self):
        self._ensure_capacity()
        tdl_slim(*self._args(), self._counters)

    def tidy_shrink(self):
        if self.height < 1:
            raise RuntimeError("cannot shrink a height-0 structure")
        self._ensure_capacity()
        tdl_shrink(*self._args(), self._counters)

    # -- debug / test support ------------------------------------------

    def level_keys(self, lvl):
        if not (0 <= lvl <= self.height):
            raise IndexError(lvl)
        out = []
        u = int(self._nxt[self._sent[lvl]])
        while u != NIL:
            out.append(int(self._key[u]))
            u = int(self._nxt[u])
        return out

    def keys(self):
        return self.level_keys(self.height)

    def level_sizes(self):
        return [int(self._lsize[j]) for j in range(self.height + 1)]

    def validate(self):
        code = int(tdl_validate(self._key, self._nxt, self._down, self._sent,
                                self._lsize, self._st, self.epsilon))
        if code != 0:
            raise InvariantViolation("%s (code %d)" % (_ERRORS.get(code, "?"), code))

    def run_mixed(self, ops, xs, validate_each=False, check_bounds=False):
        """Test driver: replay a coded op sequence inside one kernel."""
        ops = np.ascontiguousarray(ops, dtype=np.int8)
        xs = np.ascontiguousarray(xs, dtype=np.int64)
        distinct = min(len(np.unique(xs)), self.n + xs.shape[0])
        need = (self.n + distinct) * (SLIM_FACTOR + 1) + 8 * MAX_LEVELS
        if self._available() < need:
            self._grow_pool(need)
        code, idx = tdl_run_mixed(*self._args(), self.epsilon, ops, xs,
                                  self._counters, self._path, self._aux,
                                  validate_each, check_bounds)
        return int(code), int(idx)
