"""Pure-Python (numpy) kernel backend.

Same contracts as the compiled backend in ``_scan_cy``:

* ``radius_windows`` / ``knn_windows`` return windows in CSR form
  ``(indptr, members)`` with member indices sorted ascending per window.
* ``window_stats`` computes (m, in-window edge count, in-window triangle
  count) per window against a CSR adjacency whose neighbor lists are sorted.

Membership tests compare squared Euclidean distance against ``r*r`` (L1 sums
against ``r`` for Manhattan); cell-range arithmetic uses a padded radius so
float rounding can never drop a boundary cell, while the exact comparison
decides membership.  KNN selects the focal plus its k-1 nearest others by
(squared distance, id rank).
"""

from __future__ import annotations

import numpy as np

METRIC_EUCLIDEAN = 0
METRIC_MANHATTAN = 1


def _pad(r: float) -> float:
    # conservative bound for the cell-range computation only
    return r + r * 1e-12 + 1e-9


def _gather(grid, qx: float, qy: float, reach: float):
    """All point indices in cells overlapping the square qx/qy +- reach."""
    inv = 1.0 / grid.cell
    cx_lo = min(max(int(np.floor((qx - reach - grid.x0) * inv)), 0), grid.nx - 1)
    cx_hi = min(max(int(np.floor((qx + reach - grid.x0) * inv)), 0), grid.nx - 1)
    cy_lo = min(max(int(np.floor((qy - reach - grid.y0) * inv)), 0), grid.ny - 1)
    cy_hi = min(max(int(np.floor((qy + reach - grid.y0) * inv)), 0), grid.ny - 1)
    rows = []
    for cy in range(cy_lo, cy_hi + 1):
        a = grid.cell_start[cy * grid.nx + cx_lo]
        b = grid.cell_start[cy * grid.nx + cx_hi + 1]
        if b > a:
            rows.append(grid.point_order[a:b])
    if not rows:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(rows)


def radius_windows(grid, xs, ys, centers, radius, metric):
    """CSR windows for each center: focal plus all points within ``radius``."""
    centers = np.asarray(centers, dtype=np.int64)
    indptr = np.zeros(centers.shape[0] + 1, dtype=np.int64)
    chunks = []
    reach = _pad(radius)
    for i, c in enumerate(centers):
        qx = xs[c]
        qy = ys[c]
        cand = _gather(grid, qx, qy, reach)
        dx = xs[cand] - qx
        dy = ys[cand] - qy
        if metric == METRIC_EUCLIDEAN:
            keep = dx * dx + dy * dy <= radius * radius
        else:
            keep = np.abs(dx) + np.abs(dy) <= radius
        members = np.sort(cand[keep])
        chunks.append(members)
        indptr[i + 1] = indptr[i] + members.shape[0]
    members = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return indptr, members


def knn_windows(grid, xs, ys, id_rank, centers, k):
    """CSR windows of exactly k members: focal + k-1 nearest by (d^2, id rank)."""
    centers = np.asarray(centers, dtype=np.int64)
    n = xs.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds point count {n}")
    out = np.empty(centers.shape[0] * k, dtype=np.int64)
    span = max(grid.cell, 1e-9)
    for i, c in enumerate(centers):
        qx = xs[c]
        qy = ys[c]
        reach = span
        while True:
            cand = _gather(grid, qx, qy, _pad(reach))
            if cand.shape[0] >= k:
                dx = xs[cand] - qx
                dy = ys[cand] - qy
                d2 = dx * dx + dy * dy
                d2[cand == c] = -1.0  # focal always first
                sel = np.lexsort((id_rank[cand], d2))[:k]
                dk = d2[sel[-1]]
                if dk <= reach * reach:
                    win = np.sort(cand[sel])
                    out[i * k:(i + 1) * k] = win
                    break
                reach = max(float(np.sqrt(dk)) * (1.0 + 1e-12), reach)
            else:
                reach *= 2.0
    indptr = np.arange(centers.shape[0] + 1, dtype=np.int64) * k
    return indptr, out


def window_stats(win_indptr, members, adj_indptr, adj_nbrs, n):
    """Per-window (m, edge_count, triangles) against the CSR adjacency.

    A stamp array marks the current window's members so each membership test
    is O(1); triangles are counted once per in-window edge (u, v) with u < v
    by merging the two sorted neighbor lists and keeping common w > v.
    """
    nwin = win_indptr.shape[0] - 1
    m_out = np.empty(nwin, dtype=np.int64)
    e_out = np.zeros(nwin, dtype=np.int64)
    t_out = np.zeros(nwin, dtype=np.int64)
    stamp = np.full(n, -1, dtype=np.int64)
    for w in range(nwin):
        mem = members[win_indptr[w]:win_indptr[w + 1]]
        m_out[w] = mem.shape[0]
        stamp[mem] = w
        edges = 0
        tris = 0
        for u in mem:
            nb = adj_nbrs[adj_indptr[u]:adj_indptr[u + 1]]
            inw = nb[(stamp[nb] == w) & (nb > u)]
            edges += inw.shape[0]
            for v in inw:
                nb_v = adj_nbrs[adj_indptr[v]:adj_indptr[v + 1]]
                common = np.intersect1d(nb, nb_v, assume_unique=True)
                if common.shape[0]:
                    tris += int(np.count_nonzero((stamp[common] == w) & (common > v)))
        e_out[w] = edges
        t_out[w] = tris
    return m_out, e_out, t_out
