"""Synthetic network generation: uniform background plus planted clusters.

A fixture generator for tests and benchmarks: background nodes uniform in a
bounding box with distance-independent Bernoulli edges, plus optional planted
clusters (nodes uniform in a disk, dense within-cluster ties).  Everything is
a pure function of the spec, seed included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .model import EdgeRecord, NodeRecord, SpatialSocialNetwork, build_network


@dataclass(frozen=True)
class ClusterSpec:
    cx: float
    cy: float
    radius: float
    n: int
    edge_p: float

    def __post_init__(self):
        if self.radius <= 0 or self.n < 0:
            raise InvalidSpec("cluster radius must be > 0 and node count >= 0")
        if not 0.0 <= self.edge_p <= 1.0:
            raise InvalidSpec("cluster edge probability must be in [0, 1]")


@dataclass(frozen=True)
class SyntheticSpec:
    n_background: int
    bbox: tuple  # (xmin, ymin, xmax, ymax)
    edge_p: float = 0.0
    clusters: tuple = field(default_factory=tuple)
    seed: int = 0

    def __post_init__(self):
        if self.n_background < 0:
            raise InvalidSpec("background node count must be >= 0")
        xmin, ymin, xmax, ymax = self.bbox
        if not (xmax > xmin and ymax > ymin):
            raise InvalidSpec("bounding box must have positive extent")
        if not 0.0 <= self.edge_p <= 1.0:
            raise InvalidSpec("background edge probability must be in [0, 1]")
        object.__setattr__(self, "clusters", tuple(self.clusters))


def _unrank_pairs(pos: np.ndarray, n: int) -> np.ndarray:
    """Map linear pair ranks to (u, v) with u < v, row-major over C(n, 2).

    At row boundaries the discriminant is a perfect square, so the float
    sqrt is exact and the floor never lands in the wrong row.
    """
    b = 2 * n - 1
    u = ((b - np.sqrt(b * b - 8.0 * pos)) // 2).astype(np.int64)
    start = u * (2 * n - u - 1) // 2
    v = pos - start + u + 1
    return np.column_stack([u, v])


def _bernoulli_pairs(n: int, p: float, rng: np.random.Generator,
                     offset: int = 0) -> np.ndarray:
    """Unordered pairs kept independently with probability p, as (m, 2) indices.

    Geometric skipping over the C(n, 2) pair ranks keeps this O(expected
    edges) instead of O(n^2).
    """
    if p <= 0.0 or n < 2:
        return np.empty((0, 2), dtype=np.int64)
    total = n * (n - 1) // 2
    if p >= 1.0:
        u, v = np.triu_indices(n, k=1)
        pairs = np.column_stack([u, v]).astype(np.int64)
        return pairs + offset
    ranks = []
    pos = -1
    while True:
        size = max(256, int((total - pos) * p * 1.1) + 16)
        jumps = rng.geometric(p, size=size).astype(np.int64)
        cum = pos + np.cumsum(jumps)
        done = int(np.searchsorted(cum, total, side="left"))
        if done < size:
            ranks.append(cum[:done])
            break
        ranks.append(cum)
        pos = int(cum[-1])
    pos_arr = np.concatenate(ranks) if ranks else np.empty(0, dtype=np.int64)
    return _unrank_pairs(pos_arr, n) + offset


def generate_synthetic(spec: SyntheticSpec) -> SpatialSocialNetwork:
    """Deterministic network for the given spec (seed included)."""
    rng = np.random.default_rng(spec.seed)
    xmin, ymin, xmax, ymax = spec.bbox

    nodes = []
    bx = rng.uniform(xmin, xmax, size=spec.n_background)
    by = rng.uniform(ymin, ymax, size=spec.n_background)
    width = len(str(max(spec.n_background - 1, 0)))
    for i in range(spec.n_background):
        nodes.append(NodeRecord(f"b{i:0{width}d}", float(bx[i]), float(by[i])))

    cluster_slices = []
    for ci, cluster in enumerate(spec.clusters):
        start = len(nodes)
        # uniform in the disk: radius by sqrt of uniform, angle uniform
        rr = cluster.radius * np.sqrt(rng.random(cluster.n))
        th = rng.uniform(0.0, 2.0 * np.pi, size=cluster.n)
        for j in range(cluster.n):
            nodes.append(NodeRecord(
                f"c{ci}_{j:03d}",
                float(cluster.cx + rr[j] * np.cos(th[j])),
                float(cluster.cy + rr[j] * np.sin(th[j])),
                label=f"cluster{ci}",
            ))
        cluster_slices.append((start, len(nodes)))

    edges = []
    for u, v in _bernoulli_pairs(spec.n_background, spec.edge_p, rng):
        edges.append(EdgeRecord(nodes[u].id, nodes[v].id))
    for (start, stop), cluster in zip(cluster_slices, spec.clusters):
        for u, v in _bernoulli_pairs(stop - start, cluster.edge_p, rng, offset=start):
            edges.append(EdgeRecord(nodes[u].id, nodes[v].id))

    return build_network(nodes, edges)


def uniform_random_network(n: int, e: int, bbox, seed: int = 0) -> SpatialSocialNetwork:
    """n uniform points with exactly e distinct uniformly-drawn edges.

    Benchmark-scale generator: edge sampling is the same uniform-pair draw
    the null model uses, so edge count is exact rather than Bernoulli-mean.
    """
    from .nullmodel import _uniform_edge_sample  # local import avoids a cycle

    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = bbox
    xs = rng.uniform(xmin, xmax, size=n)
    ys = rng.uniform(ymin, ymax, size=n)
    width = len(str(max(n - 1, 0)))
    nodes = [NodeRecord(f"n{i:0{width}d}", float(xs[i]), float(ys[i]))
             for i in range(n)]
    eidx = _uniform_edge_sample(n, e, rng)
    edges = [EdgeRecord(nodes[u].id, nodes[v].id) for u, v in eidx]
    return build_network(nodes, edges)
