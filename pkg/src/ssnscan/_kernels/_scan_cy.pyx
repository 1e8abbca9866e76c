# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend; contracts identical to _scan_py.

The loops release the GIL, so the scan driver gets real parallelism from a
plain thread pool. Membership tests are the same exact comparisons as the
pure backend (d^2 vs r*r, L1 sums vs r), so both backends return identical
windows and stats.
"""

from libc.stdlib cimport malloc, free, qsort
from libc.math cimport floor, sqrt, fabs

import numpy as np

METRIC_EUCLIDEAN = 0
METRIC_MANHATTAN = 1


cdef struct Cand:
    double d2
    long long rank
    long long idx


cdef int _cmp_i64(const void* pa, const void* pb) noexcept nogil:
    cdef long long a = (<const long long*> pa)[0]
    cdef long long b = (<const long long*> pb)[0]
    if a < b:
        return -1
    if a > b:
        return 1
    return 0


cdef int _cmp_cand(const void* pa, const void* pb) noexcept nogil:
    cdef const Cand* a = <const Cand*> pa
    cdef const Cand* b = <const Cand*> pb
    if a.d2 < b.d2:
        return -1
    if a.d2 > b.d2:
        return 1
    if a.rank < b.rank:
        return -1
    if a.rank > b.rank:
        return 1
    return 0


cdef inline long long _cell_clamp(double v, double origin, double inv, long long hi) noexcept nogil:
    cdef long long c = <long long> floor((v - origin) * inv)
    if c < 0:
        c = 0
    if c > hi:
        c = hi
    return c


cdef inline double _pad(double r) noexcept nogil:
    return r + r * 1e-12 + 1e-9


cdef long long _radius_pass(double qx, double qy, double radius, int metric,
                            double x0, double y0, double inv,
                            long long nx, long long ny,
                            const long long[::1] cell_start,
                            const long long[::1] point_order,
                            const double[::1] xs, const double[::1] ys,
                            long long[::1] members, long long offset,
                            bint fill) noexcept nogil:
    cdef double reach = _pad(radius)
    cdef double r2 = radius * radius
    cdef long long cx_lo = _cell_clamp(qx - reach, x0, inv, nx - 1)
    cdef long long cx_hi = _cell_clamp(qx + reach, x0, inv, nx - 1)
    cdef long long cy_lo = _cell_clamp(qy - reach, y0, inv, ny - 1)
    cdef long long cy_hi = _cell_clamp(qy + reach, y0, inv, ny - 1)
    cdef long long cy, a, b, t, p, count = 0
    cdef double dx, dy
    for cy in range(cy_lo, cy_hi + 1):
        a = cell_start[cy * nx + cx_lo]
        b = cell_start[cy * nx + cx_hi + 1]
        for t in range(a, b):
            p = point_order[t]
            dx = xs[p] - qx
            dy = ys[p] - qy
            if metric == 0:
                if dx * dx + dy * dy > r2:
                    continue
            else:
                if fabs(dx) + fabs(dy) > radius:
                    continue
            if fill:
                members[offset + count] = p
            count += 1
    if fill and count > 1:
        qsort(&members[offset], <size_t> count, sizeof(long long), _cmp_i64)
    return count


def radius_windows(grid, xs, ys, centers, double radius, int metric):
    """CSR windows for each center: focal plus all points within ``radius``."""
    cdef double[::1] xv = xs
    cdef double[::1] yv = ys
    cdef long long[::1] cv = np.ascontiguousarray(centers, dtype=np.int64)
    cdef long long[::1] cell_start = grid.cell_start
    cdef long long[::1] point_order = grid.point_order
    cdef double x0 = grid.x0, y0 = grid.y0, inv = 1.0 / grid.cell
    cdef long long nx = grid.nx, ny = grid.ny
    cdef long long nc = cv.shape[0]
    indptr_arr = np.zeros(nc + 1, dtype=np.int64)
    cdef long long[::1] indptr = indptr_arr
    cdef long long i
    cdef long long[::1] dummy = indptr_arr  # unused in counting pass
    with nogil:
        for i in range(nc):
            indptr[i + 1] = _radius_pass(xv[cv[i]], yv[cv[i]], radius, metric,
                                         x0, y0, inv, nx, ny, cell_start,
                                         point_order, xv, yv, dummy, 0, 0)
    np.cumsum(indptr_arr, out=indptr_arr)
    members_arr = np.empty(indptr_arr[nc], dtype=np.int64)
    cdef long long[::1] members = members_arr
    with nogil:
        for i in range(nc):
            _radius_pass(xv[cv[i]], yv[cv[i]], radius, metric,
                         x0, y0, inv, nx, ny, cell_start,
                         point_order, xv, yv, members, indptr[i], 1)
    return indptr_arr, members_arr


def knn_windows(grid, xs, ys, id_rank, centers, long long k):
    """CSR windows of exactly k members: focal + k-1 nearest by (d^2, id rank)."""
    cdef double[::1] xv = xs
    cdef double[::1] yv = ys
    cdef long long[::1] rank = np.ascontiguousarray(id_rank, dtype=np.int64)
    cdef long long[::1] cv = np.ascontiguousarray(centers, dtype=np.int64)
    cdef long long[::1] cell_start = grid.cell_start
    cdef long long[::1] point_order = grid.point_order
    cdef double x0 = grid.x0, y0 = grid.y0, inv = 1.0 / grid.cell
    cdef long long nx = grid.nx, ny = grid.ny
    cdef long long nc = cv.shape[0]
    cdef long long n = xv.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds point count {n}")
    out_arr = np.empty(nc * k, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Cand* buf = <Cand*> malloc(n * sizeof(Cand))
    if buf == NULL:
        raise MemoryError()
    cdef long long i, c, cy, a, b, t, p, count, j
    cdef double qx, qy, reach, span, dx, dy, dk, padded
    cdef long long cx_lo, cx_hi, cy_lo, cy_hi
    span = grid.cell
    if span < 1e-9:
        span = 1e-9
    try:
        with nogil:
            for i in range(nc):
                c = cv[i]
                qx = xv[c]
                qy = yv[c]
                reach = span
                while True:
                    padded = _pad(reach)
                    cx_lo = _cell_clamp(qx - padded, x0, inv, nx - 1)
                    cx_hi = _cell_clamp(qx + padded, x0, inv, nx - 1)
                    cy_lo = _cell_clamp(qy - padded, y0, inv, ny - 1)
                    cy_hi = _cell_clamp(qy + padded, y0, inv, ny - 1)
                    count = 0
                    for cy in range(cy_lo, cy_hi + 1):
                        a = cell_start[cy * nx + cx_lo]
                        b = cell_start[cy * nx + cx_hi + 1]
                        for t in range(a, b):
                            p = point_order[t]
                            dx = xv[p] - qx
                            dy = yv[p] - qy
                            buf[count].d2 = dx * dx + dy * dy
                            if p == c:
                                buf[count].d2 = -1.0
                            buf[count].rank = rank[p]
                            buf[count].idx = p
                            count += 1
                    if count >= k:
                        qsort(buf, <size_t> count, sizeof(Cand), _cmp_cand)
                        dk = buf[k - 1].d2
                        if dk <= reach * reach:
                            for j in range(k):
                                out[i * k + j] = buf[j].idx
                            qsort(&out[i * k], <size_t> k, sizeof(long long), _cmp_i64)
                            break
                        reach = sqrt(dk) * (1.0 + 1e-12)
                    else:
                        reach *= 2.0
    finally:
        free(buf)
    indptr = np.arange(nc + 1, dtype=np.int64) * k
    return indptr, out_arr


def window_stats(win_indptr, members, adj_indptr, adj_nbrs, long long n):
    """Per-window (m, edge_count, triangles) against the CSR adjacency."""
    cdef long long[::1] wip = np.ascontiguousarray(win_indptr, dtype=np.int64)
    cdef long long[::1] mem = np.ascontiguousarray(members, dtype=np.int64)
    cdef long long[::1] aip = adj_indptr
    cdef long long[::1] anb = adj_nbrs
    cdef long long nwin = wip.shape[0] - 1
    m_arr = np.empty(nwin, dtype=np.int64)
    e_arr = np.zeros(nwin, dtype=np.int64)
    t_arr = np.zeros(nwin, dtype=np.int64)
    stamp_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] m_out = m_arr
    cdef long long[::1] e_out = e_arr
    cdef long long[::1] t_out = t_arr
    cdef long long[::1] stamp = stamp_arr
    cdef long long w, lo, hi, t, u, v, p, edges, tris
    cdef long long ia, ib, ea, eb, a, b
    with nogil:
        for w in range(nwin):
            lo = wip[w]
            hi = wip[w + 1]
            m_out[w] = hi - lo
            for t in range(lo, hi):
                stamp[mem[t]] = w
            edges = 0
            tris = 0
            for t in range(lo, hi):
                u = mem[t]
                for p in range(aip[u], aip[u + 1]):
                    v = anb[p]
                    if v <= u or stamp[v] != w:
                        continue
                    edges += 1
                    # merge-intersect sorted neighbor lists of u and v
                    ia = aip[u]
                    ea = aip[u + 1]
                    ib = aip[v]
                    eb = aip[v + 1]
                    while ia < ea and ib < eb:
                        a = anb[ia]
                        b = anb[ib]
                        if a < b:
                            ia += 1
                        elif b < a:
                            ib += 1
                        else:
                            if a > v and stamp[a] == w:
                                tris += 1
                            ia += 1
                            ib += 1
            e_out[w] = edges
            t_out[w] = tris
    return m_arr, e_arr, t_arr
