"""Optimality certificates for allocations on a preference graph.

The total dissatisfaction of any allocation for k agents is at least

    sum over items v of max(k - |pred[v]|, 0)

because at most |pred[v]| agents can hold a dominator of v.  An
allocation meets this bound exactly when it is *good*: every item is
either dominated by all agents, or the labels over its closed predecessor
set are pairwise distinct and none is unassigned.  :func:`certify`
computes both sides independently and cross-checks them.

Witness strings used by :class:`GoodnessReport`:

* ``"dominated-by-all"``        -- every agent holds a dominator of the item
* ``"distinct-predecessor-labels"`` -- all closed predecessors are assigned,
  to pairwise distinct agents
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InternalInconsistency, InvalidAllocation
from .graph import (
    Allocation,
    DissatisfactionProfile,
    PreferenceGraph,
    ReachabilityIndex,
    iter_bits,
    profile,
)

DOMINATED_BY_ALL = "dominated-by-all"
DISTINCT_LABELS = "distinct-predecessor-labels"


def lower_bound(graph: PreferenceGraph, index: ReachabilityIndex, k: int) -> int:
    """Best-possible total dissatisfaction for ``k`` agents on ``graph``."""
    if k < 1:
        raise InvalidAllocation("k must be >= 1")
    total = 0
    for v in range(graph.item_count):
        gap = k - index.pred_closed_size(v)
        if gap > 0:
            total += gap
    return total


@dataclass(frozen=True)
class GoodnessReport:
    """Outcome of the goodness check over a set of items."""

    is_good: bool
    violating_items: tuple[int, ...]
    witness: Mapping[int, str]

    def to_json_dict(self) -> dict:
        return {
            "is_good": self.is_good,
            "violating_items": list(self.violating_items),
            "witness": {str(v): w for v, w in sorted(self.witness.items())},
        }


def check_goodness(
    graph: PreferenceGraph,
    index: ReachabilityIndex,
    allocation: Allocation,
    items: Iterable[int] | None = None,
) -> GoodnessReport:
    """Check each item of ``items`` (default: all) for goodness.

    An item passes if every agent holds one of its dominators, or if the
    labels over its closed predecessors are pairwise distinct and never
    unassigned.  All violators are reported, not just the first.
    """
    allocation.validate_for(graph)
    k = allocation.agent_count
    labels = allocation.to_labeling(graph.item_count)
    if items is None:
        items = range(graph.item_count)
    violating: list[int] = []
    witness: dict[int, str] = {}
    for v in items:
        agents_seen = 0  # bitmask over agents holding a predecessor
        distinct = True
        any_null = False
        for u in iter_bits(index.pred_row(v)):
            lab = labels[u]
            if lab is None:
                any_null = True
            else:
                bit = 1 << lab
                if agents_seen & bit:
                    distinct = False
                agents_seen |= bit
        if agents_seen.bit_count() == k:
            witness[v] = DOMINATED_BY_ALL
        elif distinct and not any_null:
            witness[v] = DISTINCT_LABELS
        else:
            violating.append(v)
    return GoodnessReport(not violating, tuple(violating), witness)


@dataclass(frozen=True)
class Certificate:
    """Joint report: achieved total, the lower bound, and goodness."""

    total: int
    lower_bound: int
    matches_bound: bool
    goodness: GoodnessReport
    profile: DissatisfactionProfile

    def to_json_dict(self) -> dict:
        return {
            "total": self.total,
            "lower_bound": self.lower_bound,
            "matches_bound": self.matches_bound,
            "profile": list(self.profile.per_agent),
            "goodness": self.goodness.to_json_dict(),
        }


def certify(
    graph: PreferenceGraph,
    index: ReachabilityIndex,
    allocation: Allocation,
    k: int | None = None,
) -> Certificate:
    """Certify ``allocation``: bound comparison and goodness, cross-checked.

    The bound comparison and the goodness check are computed independently
    and must agree (an allocation meets the bound iff it is good); a
    disagreement raises :class:`InternalInconsistency`.
    """
    if k is None:
        k = allocation.agent_count
    elif k != allocation.agent_count:
        raise InvalidAllocation(
            f"k={k} does not match allocation with {allocation.agent_count} agents"
        )
    prof = profile(graph, index, allocation)
    bound = lower_bound(graph, index, k)
    goodness = check_goodness(graph, index, allocation)
    matches = prof.total == bound
    if matches != goodness.is_good:
        raise InternalInconsistency(
            f"bound comparison ({prof.total} vs {bound}) disagrees with "
            f"goodness check (is_good={goodness.is_good})"
        )
    return Certificate(prof.total, bound, matches, goodness, prof)


def normalize_to_antichains(
    graph: PreferenceGraph,
    index: ReachabilityIndex,
    allocation: Allocation,
) -> Allocation:
    """Drop every item dominated by another item of the same bundle.

    Leaves each per-agent dissatisfaction unchanged; the resulting bundles
    are antichains (possibly empty).
    """
    allocation.validate_for(graph)
    new_bundles = []
    for bundle in allocation.bundles:
        mask = 0
        for v in bundle:
            mask |= 1 << v
        kept = frozenset(
            v for v in bundle if index.pred_row(v) & mask & ~(1 << v) == 0
        )
        new_bundles.append(kept)
    return Allocation(allocation.agent_count, tuple(new_bundles))
