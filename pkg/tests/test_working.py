"""Working-set variant: oracle definitions, detection levels,
comparison budgets, and the label-driven rebuild postconditions."""

import math

import numpy as np
import pytest

from todolists import (
    InvariantViolation,
    WorkingSetOracle,
    WorkingTodoList,
    comparison_bound,
    detection_level_bound,
    working_set_number,
)
from todolists.working import level_for_wsn


class TestBuild:
    def test_small_universe_level_zero_bucket(self):
        wt = WorkingTodoList(7, 0.2)
        assert wt.level_keys(wt.height) == list(range(1, 8))
        assert len(wt.level_keys(0)) <= 6  # 1/eps + 1
        wt.validate()

    def test_single_key_universe(self):
        wt = WorkingTodoList(1, 0.5)
        out = wt.access(1)
        assert out.found_level == 0
        wt.validate()

    def test_build_at_scale_validates(self):
        wt = WorkingTodoList(10 ** 4, 0.2)
        wt.validate(wsn=np.full(10 ** 4 + 1, 10 ** 4, dtype=np.int64))

    @pytest.mark.parametrize("n,eps", [(0, 0.2), (-3, 0.2), (5, 0.0), (5, 1.0)])
    def test_parameter_errors(self, n, eps):
        with pytest.raises(ValueError):
            WorkingTodoList(n, eps)

    def test_access_outside_universe(self):
        wt = WorkingTodoList(10, 0.2)
        with pytest.raises(ValueError):
            wt.access(11)
        with pytest.raises(ValueError):
            wt.access(0)


class TestWorkingSetOracle:
    def test_direct_definition_example(self):
        # history (3, 1, 3): before the third access w(3) = |{3, 1}| = 2
        assert working_set_number([3, 1], 3, 100) == 2

    def test_never_accessed_is_n(self):
        assert working_set_number([], 42, 100) == 100
        assert working_set_number([1, 2, 3], 42, 100) == 100

    def test_two_implementations_agree_on_random_histories(self):
        rng = np.random.default_rng(13)
        n = 60
        orc = WorkingSetOracle(n)
        history = []
        for _ in range(10 ** 4):
            x = int(rng.integers(1, n + 1))
            direct = working_set_number(history, x, n)
            incremental = orc.record(x)
            assert direct == incremental
            history.append(x)

    def test_recency_rank_equals_wsn(self):
        orc = WorkingSetOracle(10)
        for x in (4, 7, 4, 2):
            orc.record(x)
        assert orc.recency_order() == [2, 4, 7]
        w = orc.wsn_all()
        assert w[2] == 1 and w[4] == 2 and w[7] == 3 and w[9] == 10


class TestDetectionLevel:
    def test_square_jump_formula(self):
        # a key first present at level 9 is caught by level 16
        assert 9 + math.ceil(2 * math.sqrt(9)) + 1 == 16
        assert detection_level_bound(1, 0.2) >= 0

    def test_found_level_within_bound(self):
        n, eps = 4000, 0.2
        wt = WorkingTodoList(n, eps)
        orc = WorkingSetOracle(n)
        rng = np.random.default_rng(3)
        for _ in range(4000):
            x = int(rng.integers(1, n + 1))
            w = orc.record(x)
            out = wt.access(x)
            assert out.found_level <= min(detection_level_bound(w, eps), wt.height)


class TestAccess:
    def test_immediately_repeated_access_is_cheap(self):
        n, eps = 5000, 0.2
        wt = WorkingTodoList(n, eps)
        rng = np.random.default_rng(8)
        for _ in range(500):
            wt.access(int(rng.integers(1, n + 1)))
        x = int(rng.integers(1, n + 1))
        wt.access(x)
        out = wt.access(x)  # pre-access w(x) = 1
        assert out.found_level <= 1
        assert out.comparisons <= math.ceil(1 / eps) + 4

    def test_moves_to_queue_front(self):
        wt = WorkingTodoList(50, 0.3)
        for x in (10, 20, 30, 20):
            wt.access(x)
        assert wt.queue_order()[:3] == [20, 30, 10]

    @pytest.mark.parametrize("eps", [0.1, 0.2, 0.35])
    def test_comparison_budget_random_workload(self, eps):
        n = 3000
        wt = WorkingTodoList(n, eps)
        orc = WorkingSetOracle(n)
        rng = np.random.default_rng(21)
        for i in range(6000):
            x = int(rng.integers(1, n + 1)) if i % 3 else int(rng.integers(1, 40))
            w = orc.record(x)
            out = wt.access(x)
            assert out.comparisons <= comparison_bound(w, eps), (i, x, w, out)
            if i % 500 == 0:
                wt.validate(wsn=orc.wsn_all())
                ro = orc.recency_order()
                assert wt.queue_order()[: len(ro)] == ro
        wt.validate(wsn=orc.wsn_all())


class TestRebuild:
    def test_level_zero_restored_and_labels_cleared(self):
        n, eps = 2000, 0.2
        wt = WorkingTodoList(n, eps)
        rng = np.random.default_rng(5)
        saw_rebuild = False
        for _ in range(300):
            out = wt.access(int(rng.integers(1, n + 1)))
            if out.rebuild is not None:
                saw_rebuild = True
                assert len(wt.level_keys(0)) <= 1 / eps + 1
                assert int(wt._label.max()) == 0
        assert saw_rebuild
        wt.validate()

    def test_post_rebuild_level_sizes_bounded(self):
        # after a rebuild of index i, |L_j| <= (2-eps)^j/eps + n_i/2^(i-j) + 1
        n, eps = 10 ** 4, 0.2
        wt = WorkingTodoList(n, eps)
        rng = np.random.default_rng(17)
        checked = 0
        for _ in range(2000):
            out = wt.access(int(rng.integers(1, n + 1)))
            if out.rebuild is None:
                continue
            i = out.rebuild["levels_rebuilt"]
            sizes = wt.level_sizes()
            n_i = sizes[i]
            for j in range(i):
                bound = (2 - eps) ** j / eps + n_i / 2 ** (i - j) + 1
                assert sizes[j] <= bound, (i, j, sizes[j], bound)
            checked += 1
        assert checked > 10

    def test_rebuild_touch_budget_calibrated(self):
        # amortized form of the rebuild analysis: touches against
        # eps^-1 * sum(log2 w).  K' calibrated on this workload shape
        # once and frozen with 2x headroom.
        n, eps = 10 ** 4, 0.2
        wt = WorkingTodoList(n, eps)
        orc = WorkingSetOracle(n)
        rng = np.random.default_rng(29)
        logsum = 0.0
        for _ in range(10 ** 4):
            x = int(rng.integers(1, n + 1))
            logsum += math.log2(max(orc.record(x), 2))
            wt.access(x)
        k_prime = wt.stats.rebuild_touches / (logsum / eps)
        assert k_prime <= 130.0  # measured ~65 at this scale


class TestValidatorCatchesDamage:
    def test_property5_violation_detected(self):
        wt = WorkingTodoList(100, 0.2)
        wt.access(42)
        w = np.full(101, 100, dtype=np.int64)
        w[42] = 1
        wt.validate(wsn=w)
        w[77] = 1  # oracle claims 77 was just accessed; it was not
        with pytest.raises(InvariantViolation):
            wt.validate(wsn=w)

    def test_queue_corruption_detected(self):
        wt = WorkingTodoList(50, 0.2)
        wt.access(10)
        wt._qnext[10] = 10
        with pytest.raises(InvariantViolation):
            wt.validate()


def test_level_for_wsn_matches_float_log():
    for eps in (0.1, 0.2, 0.35, 0.5):
        for w in (1, 2, 3, 10, 357, 358, 10 ** 4):
            got = level_for_wsn(w, eps)
            if w == 1:
                assert got == 0
            else:
                assert abs(got - math.ceil(math.log(w) / math.log(2 - eps))) <= 1
