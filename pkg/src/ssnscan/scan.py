"""Moving-window scan engine.

One pass per focal node computes all four window statistics at once (the
window query dominates cost, so the statistics share the retrieval):

* edge count — edges with both endpoints inside the window,
* network density — edge count over m(m-1)/2 potential ties,
* triads — triangles with all three corners inside the window,
* transitivity — triads over C(m, 3) possible triples.

Degenerate windows define density (m < 2) and transitivity (m < 3) as 0.
Per-node evaluations are independent; any worker count gives bitwise
identical results.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DegenerateNetwork, EmptySpecList, SpecMismatch, SSNScanError
from .model import KNN, NeighborhoodSpec, ScanValue, SpatialSocialNetwork
from .spatial import PointIndex

ENGINE_VERSION = "0.1.0"

STATISTICS = ("edge_count", "density", "triads", "transitivity")

# CLI / report aliases
STAT_ALIASES = {
    "edgescan": "edge_count",
    "ndscan": "density",
    "triads": "triads",
    "transitivity": "transitivity",
    "edge_count": "edge_count",
    "density": "density",
}

_BLOCK = 4096


def resolve_statistic(name: str) -> str:
    try:
        return STAT_ALIASES[name.lower()]
    except KeyError:
        raise SSNScanError(
            f"unknown statistic {name!r}; choose from {sorted(set(STAT_ALIASES))}"
        ) from None


class ScanResult:
    """Per-node statistics for one neighborhood spec, in network node order."""

    def __init__(self, spec: NeighborhoodSpec, ids, m, edge_count, triads,
                 provenance: dict):
        self.spec = spec
        self.ids = tuple(ids)
        self.m = m
        self.edge_count = edge_count
        self.triads = triads
        self.density = _density(edge_count, m)
        self.transitivity = _transitivity(triads, m)
        self.provenance = provenance

    def statistic(self, name: str) -> np.ndarray:
        return getattr(self, resolve_statistic(name))

    @property
    def values(self) -> dict:
        return {
            nid: ScanValue(nid, int(self.m[i]), int(self.edge_count[i]),
                           float(self.density[i]), int(self.triads[i]),
                           float(self.transitivity[i]))
            for i, nid in enumerate(self.ids)
        }

    def value(self, node_id) -> ScanValue:
        i = self.ids.index(node_id)
        return ScanValue(node_id, int(self.m[i]), int(self.edge_count[i]),
                         float(self.density[i]), int(self.triads[i]),
                         float(self.transitivity[i]))

    def __len__(self):
        return len(self.ids)


def _density(edge_count, m):
    pairs = m * (m - 1)
    out = np.zeros(m.shape[0], dtype=np.float64)
    np.divide(2.0 * edge_count, pairs, out=out, where=pairs > 0)
    return out


def _transitivity(triads, m):
    triples = m * (m - 1) * (m - 2) // 6
    out = np.zeros(m.shape[0], dtype=np.float64)
    np.divide(triads, triples, out=out, where=triples > 0)
    return out


def _provenance(net: SpatialSocialNetwork, spec: NeighborhoodSpec) -> dict:
    return {
        "engine_version": ENGINE_VERSION,
        "network_sha256": net.content_hash(),
        "spec": spec.describe(),
    }


def scan(net: SpatialSocialNetwork, index: PointIndex, spec: NeighborhoodSpec,
         workers: int = 1) -> ScanResult:
    """Run the combined window scan over every node."""
    if spec.kind == KNN and spec.k > net.n:
        raise SpecMismatch(f"knn k={spec.k} exceeds network size n={net.n}")
    n = net.n
    m = np.zeros(n, dtype=np.int64)
    ec = np.zeros(n, dtype=np.int64)
    tri = np.zeros(n, dtype=np.int64)

    def run_block(a: int, b: int):
        centers = np.arange(a, b, dtype=np.int64)
        indptr, members = index._windows_block(spec, centers)
        bm, be, bt = _kernels.window_stats(indptr, members, net.adj_indptr,
                                           net.adj_indices, n)
        m[a:b] = bm
        ec[a:b] = be
        tri[a:b] = bt

    blocks = [(s, min(s + _BLOCK, n)) for s in range(0, n, _BLOCK)]
    if workers <= 1 or len(blocks) <= 1:
        for a, b in blocks:
            run_block(a, b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_block, a, b) for a, b in blocks]
            for f in futures:
                f.result()

    ids = tuple(nd.id for nd in net.nodes)
    return ScanResult(spec, ids, m, ec, tri, _provenance(net, spec))


def edge_scan(net, index, spec, workers: int = 1) -> ScanResult:
    """Per-node count of edges entirely inside the focal window."""
    return scan(net, index, spec, workers=workers)


def nd_scan(net, index, spec, workers: int = 1) -> ScanResult:
    """Per-node density of the window-induced subgraph."""
    return scan(net, index, spec, workers=workers)


def triad_scan(net, index, spec, workers: int = 1) -> ScanResult:
    """Per-node triangle count and transitivity inside the focal window."""
    return scan(net, index, spec, workers=workers)


def global_triads(net: SpatialSocialNetwork) -> tuple[int, float]:
    """Exact whole-network triangle count and count / C(n, 3)."""
    if net.n < 3:
        raise DegenerateNetwork(f"triads undefined for n={net.n}")
    full = np.arange(net.n, dtype=np.int64)
    indptr = np.array([0, net.n], dtype=np.int64)
    _, _, tri = _kernels.window_stats(indptr, full, net.adj_indptr,
                                      net.adj_indices, net.n)
    count = int(tri[0])
    triples = net.n * (net.n - 1) * (net.n - 2) // 6
    return count, count / triples


@dataclass
class SuiteEntry:
    """Outcome of one spec in a batch run: a result or the error that stopped it."""

    spec: NeighborhoodSpec
    result: Optional[ScanResult]
    error: Optional[Exception]

    @property
    def ok(self) -> bool:
        return self.error is None


def run_scan_suite(net, index, specs, workers: int = 1) -> list[SuiteEntry]:
    """Scan once per spec; a failing spec is recorded and the rest continue."""
    specs = list(specs)
    if not specs:
        raise EmptySpecList("no neighborhood specs supplied")
    entries = []
    for spec in specs:
        try:
            entries.append(SuiteEntry(spec, scan(net, index, spec, workers=workers), None))
        except SSNScanError as exc:
            entries.append(SuiteEntry(spec, None, exc))
    return entries
