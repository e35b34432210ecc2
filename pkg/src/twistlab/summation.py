"""Deterministic summation helpers.

Floating-point sums here are order-sensitive; every reduction in the package
goes through these helpers so that results are bit-stable for a fixed
partition count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np


def kahan_sum(values: Iterable[complex]) -> complex:
    """Compensated (Kahan) sum in the given iteration order."""
    s = 0.0 + 0.0j
    c = 0.0 + 0.0j
    for v in values:
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def pairwise_sum(arr: np.ndarray) -> complex:
    """Pairwise reduction of a 1-d array; deterministic for a fixed length."""
    a = np.asarray(arr)
    n = a.shape[0]
    if n == 0:
        return 0.0 + 0.0j
    while n > 1:
        half = n // 2
        head = a[: 2 * half]
        a = head[0::2] + head[1::2]
        if n % 2:
            a = np.concatenate([a, arr[-1:]]) if a is arr else np.append(a, arr[n - 1])
        arr = a
        n = a.shape[0]
    return complex(a[0])


def partitioned_sum(
    n_items: int,
    chunk_eval: Callable[[int, int], complex],
    partitions: int = 1,
    workers: int = 1,
) -> complex:
    """Sum chunk_eval(lo, hi) over a fixed partition of range(n_items).

    The partition layout depends only on (n_items, partitions), and partial
    results are combined in partition order, so the result is bit-stable for
    a fixed partition count regardless of worker count.
    """
    partitions = max(1, min(partitions, n_items)) if n_items else 1
    bounds = np.linspace(0, n_items, partitions + 1, dtype=int)
    jobs = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: chunk_eval(*ab), jobs))
    else:
        parts = [chunk_eval(lo, hi) for lo, hi in jobs]
    return kahan_sum(parts)


def ordered_product(factors: Sequence[complex]) -> complex:
    """Product in the given (canonical) order; products are order-sensitive."""
    out = 1.0 + 0.0j
    for f in factors:
        out *= f
    return out
