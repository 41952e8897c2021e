"""Exact allocation of items under a common preference DAG.

Items form a directed acyclic preference graph; an arc (a, b) means
every agent prefers a over b.  An agent's dissatisfaction is the number
of items it holds no dominator of, and the solvers here minimize the
total dissatisfaction exactly: in linear time on polytrees and for two
agents, in polynomial time on series-parallel graphs, out-cacti and
graphs of width at most two, and by exhaustive search on small instances.
Every solution ships with an optimality certificate.
"""

from .certificates import (
    Certificate,
    GoodnessReport,
    certify,
    check_goodness,
    lower_bound,
    normalize_to_antichains,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    Allocation,
    DissatisfactionProfile,
    PreferenceGraph,
    ReachabilityIndex,
    UndirectedGraph,
    build_graph,
    dissatisfaction,
    induced_subgraph,
    profile,
    reachability,
    weak_components,
)
from .instances import (
    fig2_reference_allocation,
    fixtures,
    good_allocation_from_coloring,
    random_dag,
    random_out_cactus,
    random_out_tree,
    random_polytree,
    random_sp,
    random_undirected,
    random_width_two,
    reduce_coloring_to_instance,
    x_graph,
    x_vertices,
)
from .matching import (
    BipartiteGraph,
    ChainPartition,
    Matching,
    chain_partition,
    max_matching,
    min_weight_k_matching,
)
from .oracle import (
    OracleResult,
    brute_force_optimum,
    brute_force_optimum_antichains,
    exact_k_coloring,
    max_antichain_brute,
)
from .recognize import (
    CactusCycle,
    CactusDecomposition,
    ClassReport,
    SpDecomposition,
    SpLeaf,
    SpParallel,
    SpSeries,
    cactus_decompose,
    classify,
    is_out_tree,
    is_polytree,
    sp_decompose,
    width,
)
from .solvers import (
    SolveResult,
    solve_auto,
    solve_by_components,
    solve_canonical_many_agents,
    solve_out_cactus,
    solve_out_tree,
    solve_polytree,
    solve_series_parallel,
    solve_two_agents,
    solve_width_two,
)

__version__ = "0.1.0"
