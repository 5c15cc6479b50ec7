"""Seeded, partitioned Monte Carlo driver.

The sample budget is split over a fixed number of partitions; each partition
draws from its own counter-based Philox stream keyed by (seed, stream,
partition).  Results are reduced in partition order, so estimates are
bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

DEFAULT_PARTITIONS = 64
_MASK64 = (1 << 64) - 1


def partition_rng(seed: int, stream: int, partition: int) -> np.random.Generator:
    key = ((seed & _MASK64) << 64) | ((stream & 0xFFFFFFFF) << 32) | (partition & 0xFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class McResult:
    value: float
    stderr: float
    samples: int
    seed: int

    def within(self, other: float, sigmas: float) -> bool:
        return abs(self.value - other) <= sigmas * self.stderr


def mc_run(
    sample_batch,
    budget: int,
    seed: int,
    scale: float = 1.0,
    partitions: int = DEFAULT_PARTITIONS,
    workers: int = 1,
    stream: int = 0,
) -> McResult:
    """Estimate ``scale * mean(integrand)`` over ``budget`` samples.

    ``sample_batch(rng, n)`` returns the n integrand values of one partition.
    """
    if budget < partitions:
        partitions = max(1, int(budget))
    counts = [budget // partitions + (1 if i < budget % partitions else 0)
              for i in range(partitions)]

    def one(i: int) -> tuple[float, float, int]:
        n = counts[i]
        if n == 0:
            return 0.0, 0.0, 0
        vals = np.asarray(sample_batch(partition_rng(seed, stream, i), n), dtype=float)
        return float(np.sum(vals)), float(np.sum(vals * vals)), vals.size

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(partitions)))
    else:
        parts = [one(i) for i in range(partitions)]

    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    n = sum(p[2] for p in parts)
    if n == 0:
        return McResult(0.0, 0.0, 0, seed)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return McResult(scale * mean, scale * np.sqrt(var / n), n, seed)


def box_volume(box: np.ndarray) -> float:
    box = np.asarray(box, dtype=float)
    return float(np.prod(box[:, 1] - box[:, 0]))


def uniform_in_box(rng: np.random.Generator, box: np.ndarray, n: int) -> np.ndarray:
    box = np.asarray(box, dtype=float)
    u = rng.random((n, box.shape[0]))
    return box[:, 0] + u * (box[:, 1] - box[:, 0])
