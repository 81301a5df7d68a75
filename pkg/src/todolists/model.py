"""Plain sorted-set reference model for differential testing.

Deliberately built on ``bisect`` over a Python list plus a hash set,
sharing no code with any engine under test.
"""

import bisect


class SortedSetModel:
    """The behavior every dictionary in this package must match."""

    def __init__(self, keys=()):
        self._set = set(int(k) for k in keys)
        self._sorted = sorted(self._set)

    @property
    def n(self):
        return len(self._set)

    def __len__(self):
        return len(self._set)

    def contains(self, x):
        return int(x) in self._set

    def insert(self, x):
        x = int(x)
        if x in self._set:
            return False
        self._set.add(x)
        bisect.insort(self._sorted, x)
        return True

    def delete(self, x):
        x = int(x)
        if x not in self._set:
            return False
        self._set.remove(x)
        del self._sorted[bisect.bisect_left(self._sorted, x)]
        return True

    def predecessor(self, x):
        """Largest stored key strictly below x, or None."""
        i = bisect.bisect_left(self._sorted, int(x))
        return self._sorted[i - 1] if i else None

    def keys(self):
        return list(self._sorted)
