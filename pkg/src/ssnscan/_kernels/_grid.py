"""Uniform grid over the point set, shared by both kernel backends.

The grid is a flat CSR bucketing of point indices by cell: ``point_order``
holds all point indices sorted by cell id (stable, so ascending index within
a cell) and ``cell_start`` delimits each cell's slice.  Cells are row-major:
``cid = cy * nx + cx``, which makes the candidate gather for a bounding box
one contiguous slice per cell row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridData:
    x0: float
    y0: float
    cell: float
    nx: int
    ny: int
    cell_start: np.ndarray  # int64, nx*ny + 1
    point_order: np.ndarray  # int64, n


def build_grid(xs: np.ndarray, ys: np.ndarray, cell_size: float | None = None) -> GridData:
    """Bucket points into a uniform grid; cell size defaults to ~2 points/cell."""
    n = xs.shape[0]
    if n == 0:
        return GridData(0.0, 0.0, 1.0, 1, 1,
                        np.zeros(2, dtype=np.int64), np.empty(0, dtype=np.int64))
    x0 = float(xs.min())
    y0 = float(ys.min())
    w = float(xs.max()) - x0
    h = float(ys.max()) - y0
    if cell_size is None:
        area = w * h
        cell_size = float(np.sqrt(2.0 * area / n)) if area > 0 else max(w, h, 1.0)
        if cell_size <= 0:
            cell_size = 1.0
    cell_size = float(cell_size)
    nx = int(w / cell_size) + 1
    ny = int(h / cell_size) + 1
    cx = np.clip(((xs - x0) / cell_size).astype(np.int64), 0, nx - 1)
    cy = np.clip(((ys - y0) / cell_size).astype(np.int64), 0, ny - 1)
    cid = cy * nx + cx
    order = np.argsort(cid, kind="stable").astype(np.int64)
    counts = np.bincount(cid, minlength=nx * ny)
    cell_start = np.zeros(nx * ny + 1, dtype=np.int64)
    np.cumsum(counts, out=cell_start[1:])
    return GridData(x0, y0, cell_size, nx, ny, cell_start, order)
