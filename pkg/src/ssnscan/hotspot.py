"""Getis-Ord Gi* hot spot surfaces and their comparison.

``gi_star`` implements the standard binary-weight Gi* with self-inclusion:

    Gi* = (sum_j w_ij x_j - XBar W_i) / (S * sqrt((n W_i - W_i^2) / (n - 1)))

with w_ij = 1 iff distance(i, j) <= radius (self included), W_i the weight
sum, XBar the global mean and S the global population standard deviation.
Confidence flags use the two-tailed normal thresholds 1.645 / 1.960 / 2.576.

Two surfaces are produced in practice: Gi* over grid-cell point counts (the
traditional clusters-of-points view) and Gi* over per-node scan values,
reduced onto the same grid by maximum z for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import GridMismatch, InvalidSpec, NodeOutsideGrid
from .model import SpatialSocialNetwork

CONFIDENCE_THRESHOLDS = {90: 1.645, 95: 1.960, 99: 2.576}


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned grid of half-open square cells; (col, row) indexes cells."""

    x0: float
    y0: float
    cell_size: float
    ncols: int
    nrows: int

    def __post_init__(self):
        if self.cell_size <= 0:
            raise InvalidSpec("cell size must be positive")
        if self.ncols < 1 or self.nrows < 1:
            raise InvalidSpec("grid extent must be at least 1x1")

    @classmethod
    def covering(cls, xs, ys, cell_size: float, origin=None) -> "GridSpec":
        """Smallest grid of the given cell size covering all points.

        The default origin snaps to multiples of the cell size at or below
        the minimum coordinates, so grids over the same data are stable.
        """
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        if xs.size == 0:
            raise InvalidSpec("cannot cover an empty point set")
        if origin is None:
            x0 = float(np.floor(xs.min() / cell_size) * cell_size)
            y0 = float(np.floor(ys.min() / cell_size) * cell_size)
        else:
            x0, y0 = float(origin[0]), float(origin[1])
        ncols = int(np.floor((xs.max() - x0) / cell_size)) + 1
        nrows = int(np.floor((ys.max() - y0) / cell_size)) + 1
        return cls(x0, y0, float(cell_size), ncols, nrows)

    @property
    def ncells(self) -> int:
        return self.ncols * self.nrows

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """Half-open binning: a point on an interior boundary falls in the
        higher-index cell."""
        col = int(np.floor((x - self.x0) / self.cell_size))
        row = int(np.floor((y - self.y0) / self.cell_size))
        if not (0 <= col < self.ncols and 0 <= row < self.nrows):
            raise NodeOutsideGrid(f"point ({x}, {y}) outside grid")
        return col, row

    def centroids(self) -> np.ndarray:
        """Cell centers, row-major: cell index = row * ncols + col."""
        cols = np.arange(self.ncols)
        rows = np.arange(self.nrows)
        cx = self.x0 + (cols + 0.5) * self.cell_size
        cy = self.y0 + (rows + 0.5) * self.cell_size
        gx, gy = np.meshgrid(cx, cy)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def cell_polygon(self, col: int, row: int) -> list:
        """Closed exterior ring of a cell, GeoJSON coordinate order."""
        xa = self.x0 + col * self.cell_size
        ya = self.y0 + row * self.cell_size
        xb = xa + self.cell_size
        yb = ya + self.cell_size
        return [[xa, ya], [xb, ya], [xb, yb], [xa, yb], [xa, ya]]


@dataclass(frozen=True)
class GridCounts:
    grid: GridSpec
    counts: np.ndarray  # (nrows, ncols) int64

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def as_dict(self) -> dict:
        """Nonzero cells keyed by (col, row)."""
        out = {}
        rows, cols = np.nonzero(self.counts)
        for r, c in zip(rows, cols):
            out[(int(c), int(r))] = int(self.counts[r, c])
        return out

    def flat(self) -> np.ndarray:
        """Row-major cell vector aligned with GridSpec.centroids()."""
        return self.counts.ravel().astype(np.float64)


def grid_counts(net: SpatialSocialNetwork, grid: GridSpec) -> GridCounts:
    """Assign every node to exactly one cell and count them."""
    counts = np.zeros((grid.nrows, grid.ncols), dtype=np.int64)
    for nd in net.nodes:
        col, row = grid.cell_of(nd.x, nd.y)
        counts[row, col] += 1
    return GridCounts(grid, counts)


@dataclass
class GiStarSurface:
    """Per-unit Gi* z-scores plus the inputs needed to interpret them."""

    coords: np.ndarray  # (n, 2)
    z: np.ndarray  # NaN where the statistic is undefined
    radius: float
    zero_variance: bool = False
    grid: GridSpec | None = None  # set when units are grid cells

    def hot(self, level: int = 95) -> np.ndarray:
        thr = CONFIDENCE_THRESHOLDS[level]
        with np.errstate(invalid="ignore"):
            return self.z >= thr

    def cold(self, level: int = 95) -> np.ndarray:
        thr = CONFIDENCE_THRESHOLDS[level]
        with np.errstate(invalid="ignore"):
            return self.z <= -thr

    def significant(self, level: int = 95) -> np.ndarray:
        return self.hot(level) | self.cold(level)


def gi_star(values, coords, radius: float) -> GiStarSurface:
    """Binary-weight Gi* z-score for every unit.

    All values identical is a zero-variance signal: the surface comes back
    flagged with every z undefined rather than raising.
    """
    values = np.asarray(values, dtype=np.float64)
    coords = np.asarray(coords, dtype=np.float64)
    n = values.shape[0]
    if n < 2:
        raise InvalidSpec("gi_star needs at least two units")
    if coords.shape != (n, 2):
        raise InvalidSpec("coords must be an (n, 2) array matching values")
    if radius <= 0:
        raise InvalidSpec("radius must be positive")
    mean = float(values.mean())
    s = float(values.std())
    if s == 0.0:
        return GiStarSurface(coords, np.full(n, np.nan), radius, zero_variance=True)
    tree = cKDTree(coords)
    padded = radius * (1.0 + 1e-12) + 1e-9
    hits = tree.query_ball_point(coords, padded)
    z = np.empty(n, dtype=np.float64)
    r2 = radius * radius
    for i in range(n):
        nbrs = np.asarray(hits[i], dtype=np.int64)
        dx = coords[nbrs, 0] - coords[i, 0]
        dy = coords[nbrs, 1] - coords[i, 1]
        nbrs = nbrs[dx * dx + dy * dy <= r2]
        w = nbrs.shape[0]
        num = float(values[nbrs].sum()) - mean * w
        den_sq = (n * w - w * w) / (n - 1)
        if den_sq <= 0:
            z[i] = np.nan
            continue
        z[i] = num / (s * np.sqrt(den_sq))
    return GiStarSurface(coords, z, radius)


def grid_gi_star(counts: GridCounts, radius: float) -> GiStarSurface:
    """Gi* over per-cell node counts, evaluated at cell centroids."""
    surface = gi_star(counts.flat(), counts.grid.centroids(), radius)
    surface.grid = counts.grid
    return surface


def reduce_to_grid(surface: GiStarSurface, grid: GridSpec) -> GiStarSurface:
    """Reduce a node-level surface to cells by maximum z (NaN where empty)."""
    z = np.full(grid.ncells, np.nan)
    for (x, y), zi in zip(surface.coords, surface.z):
        if np.isnan(zi):
            continue
        col, row = grid.cell_of(float(x), float(y))
        idx = row * grid.ncols + col
        if np.isnan(z[idx]) or zi > z[idx]:
            z[idx] = zi
    reduced = GiStarSurface(grid.centroids(), z, surface.radius,
                            zero_variance=surface.zero_variance)
    reduced.grid = grid
    return reduced


@dataclass(frozen=True)
class LevelOverlap:
    both: int
    a_only: int
    b_only: int
    neither: int

    @property
    def jaccard(self) -> float | None:
        denom = self.both + self.a_only + self.b_only
        return self.both / denom if denom else None


@dataclass(frozen=True)
class HotspotComparison:
    ncells: int
    levels: dict  # confidence level -> LevelOverlap


def compare_hotspots(surface_a: GiStarSurface, surface_b: GiStarSurface,
                     grid: GridSpec) -> HotspotComparison:
    """Per-cell hot spot contingency between two cell-level surfaces."""
    if surface_a.z.shape[0] != grid.ncells or surface_b.z.shape[0] != grid.ncells:
        raise GridMismatch("surfaces are not reduced onto the given grid")
    for s in (surface_a, surface_b):
        if s.grid is not None and s.grid != grid:
            raise GridMismatch("surface grid differs from comparison grid")
    levels = {}
    for level in CONFIDENCE_THRESHOLDS:
        a = surface_a.hot(level)
        b = surface_b.hot(level)
        levels[level] = LevelOverlap(
            both=int(np.count_nonzero(a & b)),
            a_only=int(np.count_nonzero(a & ~b)),
            b_only=int(np.count_nonzero(~a & b)),
            neither=int(np.count_nonzero(~a & ~b)),
        )
    return HotspotComparison(grid.ncells, levels)
