"""Dynamic connectivity under vertex updates, and for intersection graphs of boxes."""

from .core import (
    BaseGraph,
    ConfigError,
    Counters,
    DynConnError,
    GeomObject,
    RangeError,
    StaleHandleError,
    StateError,
    Trace,
    TraceError,
    TraceEvent,
    UnknownError,
    load_graph,
    parse_trace,
)
from .dyn_edge_conn import DynForest, SplitReport
from .geom_components import BlockState
from .geom_conn import GeomState, exponents_for_b
from .offline import BoolMatrix, bool_matmul_dense, bool_matmul_sparse, offline_exponents, run_offline_geom, run_offline_subgraph
from .range_provider import CanonicalCollection
from .subgraph_conn import Policy, SubgraphConfig, SubgraphConn

__all__ = [
    "BaseGraph",
    "BlockState",
    "BoolMatrix",
    "CanonicalCollection",
    "ConfigError",
    "Counters",
    "DynConnError",
    "DynForest",
    "GeomObject",
    "GeomState",
    "Policy",
    "RangeError",
    "SplitReport",
    "StaleHandleError",
    "StateError",
    "SubgraphConfig",
    "SubgraphConn",
    "Trace",
    "TraceError",
    "TraceEvent",
    "UnknownError",
    "bool_matmul_dense",
    "bool_matmul_sparse",
    "exponents_for_b",
    "load_graph",
    "offline_exponents",
    "parse_trace",
    "run_offline_geom",
    "run_offline_subgraph",
]
