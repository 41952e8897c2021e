"""Exception hierarchy for prefalloc.

Every error raised on user input derives from :class:`PrefAllocError`.
:class:`InternalInconsistency` is different: it signals a bug in this
package (two computations that are provably equivalent disagreed) and is
never valid-input behaviour.
"""

from __future__ import annotations


class PrefAllocError(Exception):
    """Base class for all input-related errors."""


class GraphError(PrefAllocError):
    """Malformed preference graph input."""


class SelfLoop(GraphError):
    def __init__(self, item: int):
        super().__init__(f"self-loop on item {item}")
        self.item = item


class DuplicateArc(GraphError):
    def __init__(self, tail: int, head: int):
        super().__init__(f"duplicate arc ({tail}, {head})")
        self.arc = (tail, head)


class OutOfRangeItem(GraphError):
    def __init__(self, item: int, item_count: int):
        super().__init__(f"item {item} out of range for {item_count} items")
        self.item = item


class CycleDetected(GraphError):
    """The arc relation is not acyclic; ``cycle`` lists one offending cycle."""

    def __init__(self, cycle: list[int]):
        super().__init__("cycle detected: " + " -> ".join(map(str, cycle)))
        self.cycle = cycle


class InvalidAllocation(PrefAllocError):
    """Bundles overlap or reference unknown items."""


class PreconditionViolated(PrefAllocError):
    """A solver was called outside its stated preconditions."""


class NotPolytree(PreconditionViolated):
    pass


class NotOutTree(PreconditionViolated):
    pass


class NotSeriesParallel(PreconditionViolated):
    pass


class NotOutCactus(PreconditionViolated):
    pass


class WidthExceeded(PreconditionViolated):
    pass


class NotOneWayBipartite(PreconditionViolated):
    pass


class DecompositionMismatch(PrefAllocError):
    """A decomposition does not replay to the graph it was paired with."""


class InfeasibleCardinality(PrefAllocError):
    """No matching of the requested cardinality exists."""


class InstanceTooLarge(PrefAllocError):
    """Exhaustive search refused; the instance exceeds the stated limit."""


class Unsupported(PrefAllocError):
    """No applicable exact solver for this instance."""


class InternalInconsistency(AssertionError):
    """Two independent computations that must agree did not.

    Raised e.g. when the certified total matches the lower bound but the
    goodness check disagrees.  Indicates an implementation bug.
    """
