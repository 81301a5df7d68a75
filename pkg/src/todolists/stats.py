"""Operation counters shared by every engine.

All key comparisons in every structure go through :func:`lt` so the
counts are exact and identical in meaning across engines.  Counters
live in a small int64 array so compiled kernels can bump them in
place; :class:`OpStats` is the reading-side view.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._accel import kernel

# slots in the counter array
CMP = 0          # key comparisons
VISITS = 1       # node/record dereferences
TOUCHES = 2      # elements written during partial/global rebuilds
LREB = 3         # levels rebuilt by partial rebuilds
GREB = 4         # global rebuilds (grow / slim / shrink)
STEPS = 5        # search steps (one per level visited)
ADJ = 6          # search steps that stay inside the current record
COPIED = 7       # link slots copied by promotion reallocations
COPIED_SHRINK = 8  # link slots copied by demotion reallocations
PROMO_DELTA = 9  # total height gained across promotions

N_COUNTERS = 10


def new_counters():
    return np.zeros(N_COUNTERS, dtype=np.int64)


@kernel
def lt(a, b, counters):
    """The one counting point: ``a < b`` charged as one comparison."""
    counters[CMP] += 1
    return a < b


class OpStats:
    """Monotone operation counters for one structure instance."""

    __slots__ = ("_c",)

    def __init__(self, counters=None):
        self._c = counters if counters is not None else new_counters()

    @property
    def array(self):
        return self._c

    @property
    def comparisons(self):
        return int(self._c[CMP])

    @property
    def node_visits(self):
        return int(self._c[VISITS])

    @property
    def rebuild_touches(self):
        return int(self._c[TOUCHES])

    @property
    def level_rebuilds(self):
        return int(self._c[LREB])

    @property
    def global_rebuilds(self):
        return int(self._c[GREB])

    @property
    def total_steps(self):
        return int(self._c[STEPS])

    @property
    def adjacent_steps(self):
        return int(self._c[ADJ])

    @property
    def slots_copied(self):
        return int(self._c[COPIED])

    @property
    def slots_copied_shrinking(self):
        return int(self._c[COPIED_SHRINK])

    @property
    def promotion_delta(self):
        return int(self._c[PROMO_DELTA])

    def snapshot(self):
        return self._c.copy()

    def reset(self):
        self._c[:] = 0

    def __repr__(self):
        return (
            "OpStats(comparisons=%d, node_visits=%d, rebuild_touches=%d, "
            "level_rebuilds=%d, global_rebuilds=%d)"
            % (
                self.comparisons,
                self.node_visits,
                self.rebuild_touches,
                self.level_rebuilds,
                self.global_rebuilds,
            )
        )


@dataclass(frozen=True)
class SearchOutcome:
    """Result of one predecessor search.

    ``comparisons`` counts the descent's key comparisons only (at most
    one per level); resolving ``found`` into a counted comparison is
    the job of ``contains``.
    """

    predecessor_key: Optional[int]
    found: bool
    comparisons: int
    found_level: Optional[int] = None
