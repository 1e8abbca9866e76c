"""Window queries: Euclidean radius, Manhattan radius, and KNN.

``PointIndex`` answers all three against one of three interchangeable
backends:

* ``grid``   — uniform grid, served by the kernel backend (compiled when
               available).  The fast path for whole-network scans.
* ``kdtree`` — scipy cKDTree used to gather candidates, followed by the same
               exact comparisons the other backends use.
* ``brute``  — exhaustive vectorized scan.

All backends return identical member sets: boundary comparisons are
inclusive and performed on squared Euclidean distance (L1 sums for
Manhattan), and KNN ties at the k-th distance are broken by ascending node
id.  ``oracle_query`` is an independent plain-loop reference used to verify
the backends.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .errors import InsufficientNodes, InvalidSpec, UnknownNode
from .model import (
    EUCLIDEAN,
    KNN,
    MANHATTAN,
    NeighborhoodSpec,
    SpatialSocialNetwork,
    WindowMembership,
)

BACKENDS = ("grid", "kdtree", "brute")

_BLOCK = 4096  # bulk-query block size; fixed so results never depend on workers

_METRIC_CODE = {EUCLIDEAN: _kernels.METRIC_EUCLIDEAN,
                MANHATTAN: _kernels.METRIC_MANHATTAN}


def _as_points(source):
    """Normalize a network or an id->(x, y) mapping to (ids, xs, ys)."""
    if isinstance(source, SpatialSocialNetwork):
        ids = tuple(nd.id for nd in source.nodes)
        return ids, source.xs, source.ys
    ids = tuple(source.keys())
    xs = np.array([source[i][0] for i in ids], dtype=np.float64)
    ys = np.array([source[i][1] for i in ids], dtype=np.float64)
    return ids, xs, ys


def _id_ranks(ids) -> np.ndarray:
    order = sorted(range(len(ids)), key=lambda i: str(ids[i]))
    rank = np.empty(len(ids), dtype=np.int64)
    for r, i in enumerate(order):
        rank[i] = r
    return rank


class PointIndex:
    """Immutable spatial index over a fixed point set; queries are thread-safe."""

    def __init__(self, source, backend: str = "grid", cell_size: float | None = None):
        if backend not in BACKENDS:
            raise InvalidSpec(f"unknown index backend {backend!r}; choose from {BACKENDS}")
        self.ids, self.xs, self.ys = _as_points(source)
        self._idx = {nid: i for i, nid in enumerate(self.ids)}
        if len(self._idx) != len(self.ids):
            raise InvalidSpec("point ids must be unique")
        if isinstance(source, SpatialSocialNetwork):
            self.id_rank = source.id_rank
        else:
            self.id_rank = _id_ranks(self.ids)
        self.backend = backend
        self._grid = None
        self._tree = None
        if backend == "grid":
            self._grid = _kernels.build_grid(self.xs, self.ys, cell_size)
        elif backend == "kdtree":
            self._tree = cKDTree(np.column_stack([self.xs, self.ys]))

    @property
    def n(self) -> int:
        return len(self.ids)

    def _focal_index(self, focal) -> int:
        try:
            return self._idx[focal]
        except KeyError:
            raise UnknownNode(f"unknown node id {focal!r}") from None

    # -- single queries ------------------------------------------------------

    def query(self, focal, spec: NeighborhoodSpec) -> WindowMembership:
        i = self._focal_index(focal)
        indptr, members = self.windows(spec, centers=np.array([i], dtype=np.int64))
        ids = frozenset(self.ids[j] for j in members[indptr[0]:indptr[1]])
        return WindowMembership(focal, ids)

    def query_radius_euclidean(self, focal, radius: float) -> WindowMembership:
        return self.query(focal, NeighborhoodSpec.euclidean(radius))

    def query_radius_manhattan(self, focal, radius: float) -> WindowMembership:
        return self.query(focal, NeighborhoodSpec.manhattan(radius))

    def query_knn(self, focal, k: int) -> WindowMembership:
        return self.query(focal, NeighborhoodSpec.knn(k))

    # -- bulk queries ----------------------------------------------------------

    def windows(self, spec: NeighborhoodSpec, centers: np.ndarray | None = None,
                workers: int = 1):
        """Windows for many centers at once, in CSR form (indptr, members).

        Member indices are sorted ascending within each window.  Results are
        identical for any worker count; blocks are fixed-size and stitched in
        center order.
        """
        if spec.kind == KNN and self.n < spec.k:
            raise InsufficientNodes(f"knn k={spec.k} but only {self.n} nodes")
        if centers is None:
            centers = np.arange(self.n, dtype=np.int64)
        else:
            centers = np.asarray(centers, dtype=np.int64)
        nc = centers.shape[0]
        if nc == 0:
            return np.zeros(1, dtype=np.int64), np.empty(0, dtype=np.int64)
        blocks = [(s, min(s + _BLOCK, nc)) for s in range(0, nc, _BLOCK)]
        if workers <= 1 or len(blocks) == 1:
            parts = [self._windows_block(spec, centers[a:b]) for a, b in blocks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(self._windows_block, spec, centers[a:b])
                           for a, b in blocks]
                parts = [f.result() for f in futures]
        indptr = np.zeros(nc + 1, dtype=np.int64)
        pos = 0
        for (a, b), (ip, _) in zip(blocks, parts):
            indptr[a + 1:b + 1] = pos + ip[1:]
            pos += ip[-1]
        members = np.concatenate([mem for _, mem in parts]) if parts else np.empty(0, np.int64)
        return indptr, members

    def _windows_block(self, spec, centers):
        if self.backend == "grid":
            if spec.kind == KNN:
                return _kernels.knn_windows(self._grid, self.xs, self.ys,
                                            self.id_rank, centers, spec.k)
            return _kernels.radius_windows(self._grid, self.xs, self.ys, centers,
                                           spec.radius, _METRIC_CODE[spec.kind])
        if self.backend == "kdtree":
            return self._kdtree_block(spec, centers)
        return self._brute_block(spec, centers)

    # cKDTree gathers candidates with a slightly inflated radius; the exact
    # comparison below decides membership, so results match the other backends.
    def _kdtree_block(self, spec, centers):
        pts = np.column_stack([self.xs[centers], self.ys[centers]])
        chunks = []
        indptr = np.zeros(centers.shape[0] + 1, dtype=np.int64)
        if spec.kind == KNN:
            k = spec.k
            dists, _ = self._tree.query(pts, k=k)
            dk = np.atleast_2d(dists)[:, -1]
            for i, c in enumerate(centers):
                reach = dk[i] * (1.0 + 1e-9) + 1e-9
                while True:
                    cand = np.array(self._tree.query_ball_point(pts[i], reach),
                                    dtype=np.int64)
                    if cand.shape[0] >= k:
                        break
                    reach = reach * 2.0 + 1e-9
                dx = self.xs[cand] - self.xs[c]
                dy = self.ys[cand] - self.ys[c]
                d2 = dx * dx + dy * dy
                d2[cand == c] = -1.0
                sel = np.lexsort((self.id_rank[cand], d2))[:k]
                chunks.append(np.sort(cand[sel]))
                indptr[i + 1] = indptr[i] + k
        else:
            p = 2 if spec.kind == EUCLIDEAN else 1
            r = spec.radius
            padded = r * (1.0 + 1e-12) + 1e-9
            hits = self._tree.query_ball_point(pts, padded, p=p)
            for i, c in enumerate(centers):
                cand = np.asarray(hits[i], dtype=np.int64)
                dx = self.xs[cand] - self.xs[c]
                dy = self.ys[cand] - self.ys[c]
                if spec.kind == EUCLIDEAN:
                    keep = dx * dx + dy * dy <= r * r
                else:
                    keep = np.abs(dx) + np.abs(dy) <= r
                members = np.sort(cand[keep])
                chunks.append(members)
                indptr[i + 1] = indptr[i] + members.shape[0]
        members = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        return indptr, members

    def _brute_block(self, spec, centers):
        chunks = []
        indptr = np.zeros(centers.shape[0] + 1, dtype=np.int64)
        for i, c in enumerate(centers):
            dx = self.xs - self.xs[c]
            dy = self.ys - self.ys[c]
            if spec.kind == KNN:
                d2 = dx * dx + dy * dy
                d2[c] = -1.0
                sel = np.lexsort((self.id_rank, d2))[:spec.k]
                members = np.sort(sel)
            elif spec.kind == EUCLIDEAN:
                r = spec.radius
                members = np.nonzero(dx * dx + dy * dy <= r * r)[0]
            else:
                members = np.nonzero(np.abs(dx) + np.abs(dy) <= spec.radius)[0]
            chunks.append(members.astype(np.int64))
            indptr[i + 1] = indptr[i] + members.shape[0]
        members = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        return indptr, members


def build_index(net, backend: str = "grid", cell_size: float | None = None) -> PointIndex:
    return PointIndex(net, backend=backend, cell_size=cell_size)


def oracle_query(points, focal, spec: NeighborhoodSpec) -> WindowMembership:
    """Reference window computed by an exhaustive plain-Python scan.

    Independent of the index backends; used to verify them.  Same contract:
    inclusive boundaries, squared-distance comparisons, KNN ties by ascending
    node id.
    """
    if isinstance(points, SpatialSocialNetwork):
        points = {nd.id: (nd.x, nd.y) for nd in points.nodes}
    if focal not in points:
        raise UnknownNode(f"unknown node id {focal!r}")
    fx, fy = points[focal]
    if spec.kind == KNN:
        if len(points) < spec.k:
            raise InsufficientNodes(f"knn k={spec.k} but only {len(points)} nodes")
        ranked = []
        for nid, (x, y) in points.items():
            if nid == focal:
                continue
            dx = x - fx
            dy = y - fy
            ranked.append((dx * dx + dy * dy, str(nid), nid))
        ranked.sort(key=lambda t: (t[0], t[1]))
        members = {focal} | {nid for _, _, nid in ranked[:spec.k - 1]}
        return WindowMembership(focal, frozenset(members))
    r = spec.radius
    members = set()
    for nid, (x, y) in points.items():
        dx = x - fx
        dy = y - fy
        if spec.kind == EUCLIDEAN:
            inside = dx * dx + dy * dy <= r * r
        else:
            inside = abs(dx) + abs(dy) <= r
        if inside:
            members.add(nid)
    members.add(focal)
    return WindowMembership(focal, frozenset(members))
