"""Core data model: geolocated nodes, undirected non-planar edges, window specs.

Coordinates are assumed to be already projected to a planar metric CRS in
meters; no geodesic math is performed anywhere in the package.  The graph is
simple and undirected: parallel edges are collapsed (with a count kept on the
network), self-loops are rejected.  Distinct nodes at identical coordinates
are legal.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import (
    DanglingEdge,
    DegenerateNetwork,
    DuplicateNodeId,
    InvalidSpec,
    SelfLoop,
)

EUCLIDEAN = "euclidean"
MANHATTAN = "manhattan"
KNN = "knn"

SPEC_KINDS = (EUCLIDEAN, MANHATTAN, KNN)


@dataclass(frozen=True)
class NodeRecord:
    """A geolocated node: opaque id plus projected easting/northing in meters."""

    id: str
    x: float
    y: float
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidSpec(f"node {self.id!r}: coordinates must be finite")


@dataclass(frozen=True)
class EdgeRecord:
    """An undirected tie between two node ids; (a, b) and (b, a) are the same edge."""

    a: str
    b: str

    def key(self):
        return (self.a, self.b) if str(self.a) <= str(self.b) else (self.b, self.a)


@dataclass(frozen=True)
class NeighborhoodSpec:
    """One moving-window definition: Euclidean radius, Manhattan radius, or KNN.

    Exactly one parameterization is populated.  ``radius`` is in meters and
    must be positive.  ``k`` is the window cardinality *including* the focal
    node (so k=15 means a node and its 14 closest neighbors) and must be >= 2.
    """

    kind: str
    radius: Optional[float] = None
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind not in SPEC_KINDS:
            raise InvalidSpec(f"unknown neighborhood kind {self.kind!r}")
        if self.kind == KNN:
            if self.k is None or self.radius is not None:
                raise InvalidSpec("knn spec takes k only")
            if int(self.k) != self.k or self.k < 2:
                raise InvalidSpec("k must be an integer >= 2")
            object.__setattr__(self, "k", int(self.k))
        else:
            if self.radius is None or self.k is not None:
                raise InvalidSpec(f"{self.kind} spec takes radius only")
            if not (self.radius > 0 and math.isfinite(self.radius)):
                raise InvalidSpec("radius must be a positive finite number")
            object.__setattr__(self, "radius", float(self.radius))

    def describe(self) -> str:
        if self.kind == KNN:
            return f"knn:k={self.k}"
        return f"{self.kind}:r={self.radius:g}"

    @classmethod
    def euclidean(cls, radius: float) -> "NeighborhoodSpec":
        return cls(EUCLIDEAN, radius=radius)

    @classmethod
    def manhattan(cls, radius: float) -> "NeighborhoodSpec":
        return cls(MANHATTAN, radius=radius)

    @classmethod
    def knn(cls, k: int) -> "NeighborhoodSpec":
        return cls(KNN, k=k)

    @classmethod
    def parse(cls, text: str) -> "NeighborhoodSpec":
        """Parse the CLI syntax ``kind=euclidean,r=1000`` / ``kind=knn,k=15``.

        Bare shorthand ``euclidean:r=1000`` (the ``describe()`` form) is also
        accepted.
        """
        text = text.strip()
        if ":" in text and "=" in text and not text.startswith("kind="):
            kind, _, rest = text.partition(":")
            text = f"kind={kind},{rest}"
        fields = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise InvalidSpec(f"bad spec fragment {part!r} in {text!r}")
            key, _, val = part.partition("=")
            fields[key.strip().lower()] = val.strip()
        kind = fields.pop("kind", None)
        if kind is None:
            raise InvalidSpec(f"spec {text!r} missing kind=")
        kind = kind.lower()
        try:
            if kind == KNN:
                return cls.knn(int(fields.pop("k")))
            radius = float(fields.pop("r", fields.pop("radius", None) or "x"))
            spec = cls(kind, radius=radius)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"cannot parse spec {text!r}: {exc}") from None
        if fields:
            raise InvalidSpec(f"unexpected spec fields {sorted(fields)} in {text!r}")
        return spec


@dataclass(frozen=True)
class WindowMembership:
    """The resolved window around a focal node: always contains the focal itself."""

    focal: str
    members: frozenset

    def __post_init__(self):
        if self.focal not in self.members:
            raise InvalidSpec("window must contain its focal node")

    @property
    def m(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ScanValue:
    """All four per-node window statistics from one scan pass."""

    focal: str
    m: int
    edge_count: int
    density: float
    triads: int
    transitivity: float


def adjacency_csr(n: int, edge_index: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR adjacency (indptr, neighbors) from an (e, 2) edge array.

    Neighbor lists come out sorted ascending, which the scan kernels rely on
    for merge intersections.
    """
    e = edge_index.shape[0]
    if e == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
    src = np.concatenate([edge_index[:, 0], edge_index[:, 1]])
    dst = np.concatenate([edge_index[:, 1], edge_index[:, 0]])
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order].astype(np.int64, copy=False)


class SpatialSocialNetwork:
    """Immutable geolocated simple undirected graph.

    Construction canonicalizes edges (unordered, duplicates collapsed with a
    count), builds the adjacency structure, and precomputes the flat arrays
    the scan kernels run on.  Instances are safe to share across threads.
    """

    def __init__(self, nodes: Iterable[NodeRecord], edges: Iterable[EdgeRecord],
                 duplicate_edges: int = 0):
        self.nodes = tuple(nodes)
        self._index_of = {}
        for i, node in enumerate(self.nodes):
            if node.id in self._index_of:
                raise DuplicateNodeId(f"duplicate node id {node.id!r}")
            self._index_of[node.id] = i
        self.edges = tuple(edges)
        self.duplicate_edges = duplicate_edges

        n, e = len(self.nodes), len(self.edges)
        self.xs = np.array([nd.x for nd in self.nodes], dtype=np.float64)
        self.ys = np.array([nd.y for nd in self.nodes], dtype=np.float64)
        self.edge_index = np.empty((e, 2), dtype=np.int64)
        for j, edge in enumerate(self.edges):
            u = self._index_of[edge.a]
            v = self._index_of[edge.b]
            if u > v:
                u, v = v, u
            self.edge_index[j, 0] = u
            self.edge_index[j, 1] = v

        self.adj_indptr, self.adj_indices = adjacency_csr(n, self.edge_index)

        # Rank of each node's id in ascending id order; KNN tie-break key.
        order = sorted(range(n), key=lambda i: str(self.nodes[i].id))
        self.id_rank = np.empty(n, dtype=np.int64)
        for rank, i in enumerate(order):
            self.id_rank[i] = rank

        self._hash = None

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def e(self) -> int:
        return len(self.edges)

    def index_of(self, node_id) -> int:
        try:
            return self._index_of[node_id]
        except KeyError:
            raise DanglingEdge(f"unknown node id {node_id!r}") from None

    def has_node(self, node_id) -> bool:
        return node_id in self._index_of

    def degree(self, node_id) -> int:
        i = self.index_of(node_id)
        return int(self.adj_indptr[i + 1] - self.adj_indptr[i])

    @property
    def adjacency(self) -> dict:
        """Per-node set of neighbor ids (symmetric, derived from the edges)."""
        adj = {nd.id: set() for nd in self.nodes}
        for edge in self.edges:
            adj[edge.a].add(edge.b)
            adj[edge.b].add(edge.a)
        return adj

    def neighbor_indices(self, i: int) -> np.ndarray:
        return self.adj_indices[self.adj_indptr[i]:self.adj_indptr[i + 1]]

    def content_hash(self) -> str:
        """SHA-256 over node ids/coordinates and canonical edge list."""
        if self._hash is None:
            h = hashlib.sha256()
            for nd in self.nodes:
                h.update(f"{nd.id}\x1f{nd.x.hex()}\x1f{nd.y.hex()}\n".encode())
            h.update(b"--edges--\n")
            for u, v in self.edge_index:
                h.update(f"{u},{v}\n".encode())
            self._hash = h.hexdigest()
        return self._hash

    def __repr__(self):
        return f"SpatialSocialNetwork(n={self.n}, e={self.e})"


def build_network(nodes: Iterable[NodeRecord], edges: Iterable[EdgeRecord]) -> SpatialSocialNetwork:
    """Validate inputs and assemble an immutable network.

    Duplicate unordered edges are collapsed to one; the number dropped is kept
    on ``network.duplicate_edges``.  Self-loops and edges naming unknown nodes
    are fatal.
    """
    nodes = tuple(nodes)
    ids = set()
    for node in nodes:
        if node.id in ids:
            raise DuplicateNodeId(f"duplicate node id {node.id!r}")
        ids.add(node.id)
    seen = {}
    duplicates = 0
    for edge in edges:
        if edge.a == edge.b:
            raise SelfLoop(f"self-loop on node {edge.a!r}")
        if edge.a not in ids:
            raise DanglingEdge(f"edge ({edge.a!r}, {edge.b!r}) references missing node {edge.a!r}")
        if edge.b not in ids:
            raise DanglingEdge(f"edge ({edge.a!r}, {edge.b!r}) references missing node {edge.b!r}")
        key = edge.key()
        if key in seen:
            duplicates += 1
        else:
            seen[key] = EdgeRecord(*key)
    if duplicates:
        logging.getLogger(__name__).warning(
            "collapsed %d duplicate edge(s)", duplicates)
    return SpatialSocialNetwork(nodes, seen.values(), duplicate_edges=duplicates)


def global_density(net: SpatialSocialNetwork) -> float:
    """Whole-network density 2e / (n(n-1))."""
    if net.n < 2:
        raise DegenerateNetwork(f"density undefined for n={net.n}")
    return 2.0 * net.e / (net.n * (net.n - 1))


def average_degree(net: SpatialSocialNetwork) -> float:
    """Mean degree 2e / n."""
    if net.n < 1:
        raise DegenerateNetwork("average degree undefined for an empty network")
    return 2.0 * net.e / net.n
