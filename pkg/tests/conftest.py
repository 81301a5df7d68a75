"""Shared fixtures.

The first numba call per kernel compiles it (results are disk-cached
afterwards); warming everything up front keeps individual tests and
the acceptance timing honest.
"""

import numpy as np
import pytest

from todolists import (
    PackedTodoList,
    SkipList,
    SortedArray,
    StaticTree,
    TodoList,
    WorkingTodoList,
)
from todolists.workloads import mixed_ops


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    ops, keys = mixed_ops(0, 400, 64)
    for make in (lambda: TodoList(0.3), lambda: PackedTodoList(0.3)):
        s = make()
        s.run_mixed(ops, keys, validate_each=True, check_bounds=True)
        s.insert_many(np.arange(70, 90))
        s.search_many(np.arange(0, 100))
        s.partial_rebuild()
        s.tidy_slim()
        s.find_predecessor(5)
        s.contains(5)
        s.validate()
    sl = SkipList(seed=1, cached=True)
    sl.insert_many(np.arange(50))
    sl.search_many(np.arange(60))
    sl.delete(3)
    sl2 = SkipList(seed=1)
    sl2.insert(1)
    sl2.find_predecessor(1)
    sl2.contains(1)
    SortedArray(range(10)).search_many(np.arange(12))
    StaticTree(range(10)).search_many(np.arange(12))
    wt = WorkingTodoList(200, 0.25)
    wt.access_many(np.arange(1, 150))
    wt.access(5)
    wt.rebuild()
    wt.validate(wsn=np.full(201, 200))
