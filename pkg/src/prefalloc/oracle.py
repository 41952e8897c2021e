"""Independent ground truth for small instances.

The primary oracle enumerates every labeling of items to agents-or-
unassigned, (k+1)^n candidates, and evaluates each total exactly; it is
deliberately the dumbest trusted code in the package.  A second oracle
restricts the search to per-agent nonempty antichains (which is known to
lose no optimal solutions when k < n) and exists only to cross-validate
the first.  Exhaustive colorability and maximum-antichain searches back
the hardness-reduction and width tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InstanceTooLarge, PreconditionViolated
from .graph import (
    Allocation,
    PreferenceGraph,
    ReachabilityIndex,
    UndirectedGraph,
    iter_bits,
)

_CHUNK = 1 << 19


@dataclass(frozen=True)
class OracleResult:
    best_total: int
    best_allocation: Allocation
    best_labeling: tuple[Optional[int], ...]


def brute_force_optimum(
    graph: PreferenceGraph,
    index: ReachabilityIndex,
    k: int,
    limit: int = 12,
) -> OracleResult:
    """Exhaustive optimum over all (k+1)^n labelings.

    Returns the minimum total and the lexicographically smallest argmin
    labeling (item 0 most significant; "unassigned" sorts after agent
    k-1).  Refuses instances with more than ``limit`` items.
    """
    n = graph.item_count
    if k < 1:
        raise PreconditionViolated("k must be >= 1")
    if n > limit or n > 20:
        raise InstanceTooLarge(f"{n} items exceeds the oracle limit of {min(limit, 20)}")
    base = k + 1
    succ = np.array([index.succ_row(v) for v in range(n)], dtype=np.uint32)
    divisors = np.array([base ** (n - 1 - v) for v in range(n)], dtype=np.int64)
    count = base**n
    best_total = None
    best_idx = -1
    for start in range(0, count, _CHUNK):
        stop = min(start + _CHUNK, count)
        idx = np.arange(start, stop, dtype=np.int64)
        m = stop - start
        unions = np.zeros((m, base), dtype=np.uint32)
        rows = np.arange(m)
        for v in range(n):
            unions[rows, (idx // divisors[v]) % base] |= succ[v]
        covered = np.bitwise_count(unions[:, :k]).sum(axis=1, dtype=np.int64)
        totals = k * n - covered
        j = int(np.argmin(totals))
        if best_total is None or totals[j] < best_total:
            best_total = int(totals[j])
            best_idx = start + j
    labels: list[Optional[int]] = []
    for v in range(n):
        digit = (best_idx // int(divisors[v])) % base
        labels.append(None if digit == k else int(digit))
    return OracleResult(
        best_total if best_total is not None else 0,
        Allocation.from_labeling(k, labels),
        tuple(labels),
    )


def brute_force_optimum_antichains(
    graph: PreferenceGraph,
    index: ReachabilityIndex,
    k: int,
    limit: int = 8,
) -> OracleResult:
    """Exhaustive optimum over per-agent nonempty antichain allocations.

    Valid search space only for k < n; cross-validates
    :func:`brute_force_optimum` rather than replacing it.
    """
    n = graph.item_count
    if not 1 <= k < n:
        raise PreconditionViolated("antichain oracle needs 1 <= k < n")
    if n > limit:
        raise InstanceTooLarge(f"{n} items exceeds the oracle limit of {limit}")
    best_total = None
    best_labels: tuple[Optional[int], ...] = ()
    for digits in itertools.product(range(k + 1), repeat=n):
        masks = [0] * k
        for v, d in enumerate(digits):
            if d < k:
                masks[d] |= 1 << v
        if 0 in masks:
            continue
        antichains = True
        for mask in masks:
            for v in iter_bits(mask):
                if index.pred_row(v) & mask & ~(1 << v):
                    antichains = False
                    break
            if not antichains:
                break
        if not antichains:
            continue
        total = 0
        for mask in masks:
            row = 0
            for v in iter_bits(mask):
                row |= index.succ_row(v)
            total += n - row.bit_count()
        if best_total is None or total < best_total:
            best_total = total
            best_labels = tuple(None if d == k else d for d in digits)
    if best_total is None:
        raise PreconditionViolated("no nonempty-antichain allocation exists")
    return OracleResult(
        best_total, Allocation.from_labeling(k, list(best_labels)), best_labels
    )


def exact_k_coloring(
    undirected: UndirectedGraph, k: int, limit: int = 16
) -> Optional[list[int]]:
    """Proper k-coloring by backtracking, or None when none exists.

    Vertices are tried in descending-degree order (id tie-break) and only
    one fresh color is offered per level, which breaks color symmetry
    without losing completeness.
    """
    n = undirected.vertex_count
    if n > limit:
        raise InstanceTooLarge(f"{n} vertices exceeds the coloring limit of {limit}")
    if k < 1:
        return None if n > 0 else []
    order = sorted(range(n), key=lambda v: (-undirected.degree(v), v))
    colors = [-1] * n

    def backtrack(i: int, used: int) -> bool:
        if i == n:
            return True
        v = order[i]
        forbidden = {colors[u] for u in undirected.neighbors(v) if colors[u] >= 0}
        for c in range(min(k, used + 1)):
            if c in forbidden:
                continue
            colors[v] = c
            if backtrack(i + 1, max(used, c + 1)):
                return True
        colors[v] = -1
        return False

    return list(colors) if backtrack(0, 0) else None


def max_antichain_brute(
    graph: PreferenceGraph, index: ReachabilityIndex, limit: int = 20
) -> frozenset[int]:
    """A maximum antichain by branch-and-bound over item subsets.

    Exhaustive modulo a size-based prune; used to cross-check the
    matching-based width computation.
    """
    n = graph.item_count
    if n > limit:
        raise InstanceTooLarge(f"{n} items exceeds the antichain limit of {limit}")
    comparable_mask = [index.succ_row(v) | index.pred_row(v) for v in range(n)]
    best: list[int] = []

    def recurse(cand: int, chosen: list[int]) -> None:
        nonlocal best
        if len(chosen) + cand.bit_count() <= len(best):
            return
        if cand == 0:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        v = (cand & -cand).bit_length() - 1
        chosen.append(v)
        recurse(cand & ~comparable_mask[v], chosen)
        chosen.pop()
        recurse(cand & ~(1 << v), chosen)

    recurse((1 << n) - 1, [])
    return frozenset(best)
