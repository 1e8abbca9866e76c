"""Moving-window scan statistics for non-planar spatial social networks.

Detects localized concentrations of *connected* points: per-node edge counts
and network density over Euclidean, Manhattan, or KNN focal windows, plus
triad/transitivity scans, sensitivity analysis across window definitions,
Getis-Ord Gi* comparison, and Monte Carlo significance via edge rewiring.
"""

from ._kernels import implementation as kernel_implementation
from .model import (
    EdgeRecord,
    NeighborhoodSpec,
    NodeRecord,
    ScanValue,
    SpatialSocialNetwork,
    WindowMembership,
    average_degree,
    build_network,
    global_density,
)
from .scan import (
    ScanResult,
    edge_scan,
    global_triads,
    nd_scan,
    run_scan_suite,
    scan,
    triad_scan,
)
from .spatial import PointIndex, build_index, oracle_query

__version__ = "0.1.0"

__all__ = [
    "EdgeRecord",
    "NeighborhoodSpec",
    "NodeRecord",
    "PointIndex",
    "ScanResult",
    "ScanValue",
    "SpatialSocialNetwork",
    "WindowMembership",
    "average_degree",
    "build_index",
    "build_network",
    "edge_scan",
    "global_density",
    "global_triads",
    "kernel_implementation",
    "nd_scan",
    "oracle_query",
    "run_scan_suite",
    "scan",
    "triad_scan",
    "__version__",
]
