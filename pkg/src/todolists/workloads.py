"""Seeded workload generation for the benchmark harness.

All randomness comes from numpy's PCG64 generator, so the same seed
produces byte-identical workloads on every platform and on either
kernel backend (generation happens outside the compiled kernels).

The insert/search phases follow the published experiment recipe:
inserts draw with replacement from {0, 5, ..., 5(n-1)}, searches from
{-2, ..., 5n+3}, five searches per insert.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SEARCHES_PER_INSERT = 5

WSET_PATTERNS = ("uniform", "zipf", "windowed", "repeat-burst")


def _rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class WorkloadSpec:
    """One benchmark trial: who runs what, on which draws."""

    seed: int
    n: int
    structure: str
    epsilon: Optional[float] = None

    @property
    def search_count(self):
        return SEARCHES_PER_INSERT * self.n

    def insert_keys(self):
        """n draws, with replacement, from {0, 5, ..., 5(n-1)}."""
        g = _rng(self.seed)
        return 5 * g.integers(0, self.n, size=self.n, dtype=np.int64)

    def search_keys(self):
        """5n draws, with replacement, from {-2, ..., 5n+3}."""
        g = _rng(self.seed + 1)
        return g.integers(-2, 5 * self.n + 4, size=self.search_count, dtype=np.int64)


def mixed_ops(seed, count, key_range, p_insert=0.5, p_delete=0.25):
    """Coded op stream for oracle/validator runs.

    Returns (ops, keys): ops holds 0=insert, 1=delete, 2=search; keys
    are uniform over [0, key_range).
    """
    g = _rng(seed)
    u = g.random(count)
    ops = np.full(count, 2, dtype=np.int8)
    ops[u < p_insert + p_delete] = 1
    ops[u < p_insert] = 0
    keys = g.integers(0, key_range, size=count, dtype=np.int64)
    return ops, keys


def wset_accesses(seed, pattern, length, n, zipf_s=1.2, window=16):
    """Access sequence over the universe {1..n} for one pattern."""
    g = _rng(seed)
    if pattern == "uniform":
        return g.integers(1, n + 1, size=length, dtype=np.int64)
    if pattern == "zipf":
        ranks = np.arange(1, n + 1, dtype=np.float64)
        p = ranks ** (-float(zipf_s))
        p /= p.sum()
        return g.choice(np.arange(1, n + 1, dtype=np.int64), size=length, p=p)
    if pattern == "windowed":
        k = min(int(window), n)
        return g.integers(1, k + 1, size=length, dtype=np.int64)
    if pattern == "repeat-burst":
        half = (length + 1) // 2
        draws = g.integers(1, n + 1, size=half, dtype=np.int64)
        return np.repeat(draws, 2)[:length]
    raise ValueError("unknown access pattern %r (expected one of %s)"
                     % (pattern, ", ".join(WSET_PATTERNS)))
