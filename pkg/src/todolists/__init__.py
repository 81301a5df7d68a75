"""Todolists: top-down skiplists with provable comparison bounds.

Ordered integer dictionaries searched top-down through nested sorted
lists, restructured by halving partial rebuilds.  Includes the
reference linked engine, a packed cache-conscious engine with cached
successor keys, a working-set variant over a fixed universe, counted
baselines (skiplist, sorted array, static balanced tree), and a
benchmark harness reproducing the comparison-count experiments.
"""

from ._accel import NUMBA_ENABLED, backend_name
from .baselines import SkipList, SortedArray, StaticTree
from .core import InvariantViolation, TodoList
from .model import SortedSetModel
from .packed import PackedTodoList, table_capacity
from .stats import OpStats, SearchOutcome
from .working import (
    AccessOutcome,
    WorkingSetOracle,
    WorkingTodoList,
    comparison_bound,
    detection_level_bound,
    working_set_number,
)

__all__ = [
    "AccessOutcome",
    "InvariantViolation",
    "NUMBA_ENABLED",
    "OpStats",
    "PackedTodoList",
    "SearchOutcome",
    "SkipList",
    "SortedArray",
    "SortedSetModel",
    "StaticTree",
    "TodoList",
    "WorkingSetOracle",
    "WorkingTodoList",
    "backend_name",
    "comparison_bound",
    "detection_level_bound",
    "table_capacity",
    "working_set_number",
]

__version__ = "0.1.0"
