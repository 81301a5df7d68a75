"""Packed engine: differential equivalence, capacity discipline,
cached-key coherence, and reallocation accounting."""

import numpy as np
import pytest

from todolists import InvariantViolation, PackedTodoList, TodoList, table_capacity
from todolists.workloads import mixed_ops

FIG1 = [1, 3, 4, 7, 8, 9, 11]


def build(eps, keys):
    p = PackedTodoList(eps)
    for k in keys:
        p.insert(k)
    return p


class TestTableCapacity:
    def test_rounding_examples(self):
        assert table_capacity(5) == 8
        assert table_capacity(8) == 8
        assert table_capacity(9) == 16
        assert table_capacity(1) == 1

    def test_never_more_than_double(self):
        for height in range(1, 200):
            cap = table_capacity(height)
            assert height <= cap < 2 * height + 1


class TestSearch:
    def test_fig1_probe(self):
        p = build(0.2, FIG1)
        out = p.find_predecessor(10)
        assert out.predecessor_key == 9
        assert not out.found

    def test_visits_bounded_by_comparisons(self):
        p = build(0.3, range(0, 3000, 2))
        for x in range(-1, 6005, 11):
            c0 = p.stats.snapshot()
            out = p.find_predecessor(x)
            d = p.stats.snapshot() - c0
            assert d[1] <= out.comparisons + 1  # node visits


class TestDifferentialEquivalence:
    @pytest.mark.parametrize("seed,eps", [(1, 0.2), (2, 0.45), (3, 0.1)])
    def test_outcome_streams_match_reference(self, seed, eps):
        ops, keys = mixed_ops(seed, 20000, 1024)
        a, b = TodoList(eps), PackedTodoList(eps)
        for i in range(len(ops)):
            x = int(keys[i])
            if ops[i] == 0:
                assert a.insert(x) == b.insert(x)
            elif ops[i] == 1:
                assert a.delete(x) == b.delete(x)
            else:
                assert a.find_predecessor(x) == b.find_predecessor(x)
            assert (a.n, a.height, a.slot_count) == (b.n, b.height, b.slot_count)
        assert a.stats.comparisons == b.stats.comparisons
        assert a.stats.rebuild_touches == b.stats.rebuild_touches
        assert a.stats.global_rebuilds == b.stats.global_rebuilds
        for lvl in range(a.height + 1):
            assert a.level_keys(lvl) == b.level_keys(lvl)
        b.validate()


class TestCapacity:
    def test_power_of_two_exact_everywhere(self):
        p = build(0.2, np.random.default_rng(4).integers(0, 10 ** 6, 2000))
        h = p.height
        for x in p.keys()[::37]:
            t, cap, height = p.record_info(x)
            assert height == h - t + 1
            assert cap == table_capacity(height)
        p.validate()

    def test_total_allocation_at_most_twice_occupancy(self):
        rng = np.random.default_rng(9)
        p = PackedTodoList(0.25)
        for i in range(5000):
            if rng.random() < 0.6:
                p.insert(int(rng.integers(0, 2000)))
            else:
                p.delete(int(rng.integers(0, 2000)))
            assert p.link_capacity <= 2 * p.slot_count
        p.validate()

    def test_promotion_reallocates_only_on_crossing(self):
        p = build(0.2, range(600))
        p.tidy_slim()
        # find an element sitting at the bottom (height 1, capacity 1)
        target = None
        for x in p.keys():
            t, cap, height = p.record_info(x)
            if height == 1:
                target = x
                break
        assert target is not None
        before = p.stats.slots_copied
        p.promote(target)
        t, cap, height = p.record_info(target)
        assert t == 0 and height == p.height + 1
        assert cap == table_capacity(height)
        assert p.stats.slots_copied > before  # pow2 crossing copied slots
        if len(p.level_keys(0)) > 1:
            p.partial_rebuild()
        p.validate()


class TestPromotionCopyAccounting:
    def test_copies_amortize_against_height_gains(self):
        # random insert/delete workloads drive promotions through the
        # halving rebuilds; total slots copied while growing spans must
        # stay within 4x the accumulated height gain
        for seed in (3, 11):
            ops, keys = mixed_ops(seed, 30000, 1500)
            p = PackedTodoList(0.2)
            p.run_mixed(ops, keys)
            assert p.stats.promotion_delta > 0
            assert p.stats.slots_copied <= 4 * p.stats.promotion_delta
            p.validate()


class TestCacheCoherence:
    def test_walk_after_bulk_and_rebuilds(self):
        rng = np.random.default_rng(31)
        p = PackedTodoList(0.2)
        p.insert_many(rng.integers(0, 10 ** 7, size=10 ** 4))
        p.validate()  # includes the full cached-key walk
        p.tidy_slim()
        p.validate()

    def test_splice_updates_neighbor_cache(self):
        p = build(0.3, [10, 30])
        p.insert(20)
        p.validate()
        assert p.keys() == [10, 20, 30]
        # delete restores the old successor's key in the predecessor
        p.delete(20)
        p.validate()
        assert p.keys() == [10, 30]

    def test_corrupted_cache_detected(self):
        p = build(0.2, range(64))
        h = p.height
        first = int(p._lnext[p._off[0] + 0])
        slot = int(p._off[first]) + 0
        if p._lnext[slot] != -1:
            p._lkey[slot] += 1  # stale cached key
            with pytest.raises(InvariantViolation):
                p.validate()


class TestRules:
    def test_matches_reference_on_growth_boundary(self):
        a, b = TodoList(0.2), PackedTodoList(0.2)
        for k in range(359):
            a.insert(k)
            b.insert(k)
        assert a.height == b.height == 11
        b.validate()

    def test_delete_to_empty_resets(self):
        p = build(0.4, range(20))
        for k in range(20):
            p.delete(k)
        assert p.n == 0 and p.height == 0 and p.link_capacity == 0
        p.validate()
        p.insert(5)
        assert p.keys() == [5]
        p.validate()
