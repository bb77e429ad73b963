"""Hierarchical multicriteria label-setting over nested 2-path covers."""

from .core import (
    CostOverflowError,
    CostVector,
    Edge,
    Graph,
    ParetoSet,
    add_cost,
    dominates,
    lex_precedes,
    pareto_insert,
    weakly_dominates,
)
from .cover import CoverLevel, CoverStats, HierarchicalCover, build_hierarchy, lr_deg_select, build_cover_edges, top_level, unpack_edge
from .engine import (
    BoundsTable,
    QueryResult,
    Route,
    backward_mls,
    bound_prune,
    classic_mls,
    compute_bounds,
    connect_routes,
    hierarchical_mls,
    t_discards,
    truncate,
    tset_update,
)

__version__ = "0.1.0"
