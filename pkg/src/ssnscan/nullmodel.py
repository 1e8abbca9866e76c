"""Monte Carlo significance for scan values under edge-rewiring null models.

Node positions are frozen; only the ties are randomized, either by drawing
the same number of edges uniformly from all unordered pairs (ER-style) or by
degree-preserving double-edge swaps (configuration model).  Window
memberships depend only on positions, so they are computed once and reused
for every replicate.

Empirical p-values are one-sided (high) with the add-one correction:
p = (1 + #{replicate value >= observed}) / (1 + replicates), so p is never 0.

Each replicate r seeds its own generator from (seed, r); parallel and serial
runs produce bitwise-identical reports.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateNetwork, InvalidSpec, SpecMismatch, TooManyEdges
from .model import (
    KNN,
    EdgeRecord,
    NeighborhoodSpec,
    SpatialSocialNetwork,
    adjacency_csr,
)
from .scan import ENGINE_VERSION, resolve_statistic
from .spatial import PointIndex

MODELS = ("uniform", "configuration")

_CHUNK = 32  # replicates per reduction chunk; fixed so results never depend on workers


@dataclass(frozen=True)
class NullEnsembleSpec:
    model: str
    replicates: int
    seed: int

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidSpec(f"unknown null model {self.model!r}; choose from {MODELS}")
        if self.replicates < 1:
            raise InvalidSpec("replicates must be >= 1")


def _uniform_edge_sample(n: int, e: int, rng: np.random.Generator) -> np.ndarray:
    """e distinct unordered pairs drawn uniformly from C(n, 2), as an (e, 2) array."""
    max_pairs = n * (n - 1) // 2
    if e > max_pairs:
        raise TooManyEdges(f"{e} edges but only {max_pairs} unordered pairs exist")
    seen = set()
    out = np.empty((e, 2), dtype=np.int64)
    filled = 0
    while filled < e:
        need = e - filled
        batch = rng.integers(0, n, size=(max(2 * need, 16), 2))
        for u, v in batch:
            if u == v:
                continue
            if u > v:
                u, v = v, u
            code = u * n + v
            if code in seen:
                continue
            seen.add(code)
            out[filled, 0] = u
            out[filled, 1] = v
            filled += 1
            if filled == e:
                break
    return out


def _swap_edges(edge_index: np.ndarray, n: int, rng: np.random.Generator,
                target_swaps: int) -> np.ndarray:
    """Randomize by double-edge swaps, preserving every degree.

    Proposals creating self-loops or parallel edges are rejected.  Attempts
    are capped so rigid graphs (e.g. a triangle, which admits no swap)
    terminate; degrees are preserved however many swaps land.
    """
    eidx = edge_index.copy()
    e = eidx.shape[0]
    if e < 2:
        return eidx
    edge_set = {int(u) * n + int(v) for u, v in eidx}
    accepted = 0
    attempts = 0
    max_attempts = max(200 * target_swaps, 1000)
    while accepted < target_swaps and attempts < max_attempts:
        attempts += 1
        i, j = rng.integers(0, e, size=2)
        if i == j:
            continue
        a, b = int(eidx[i, 0]), int(eidx[i, 1])
        c, d = int(eidx[j, 0]), int(eidx[j, 1])
        if rng.random() < 0.5:
            c, d = d, c
        # propose (a, d) and (c, b)
        if a == d or c == b:
            continue
        n1 = (a, d) if a < d else (d, a)
        n2 = (c, b) if c < b else (b, c)
        code1 = n1[0] * n + n1[1]
        code2 = n2[0] * n + n2[1]
        if code1 == code2 or code1 in edge_set or code2 in edge_set:
            continue
        edge_set.discard(a * n + b if a < b else b * n + a)
        edge_set.discard(min(c, d) * n + max(c, d))
        edge_set.add(code1)
        edge_set.add(code2)
        eidx[i] = n1
        eidx[j] = n2
        accepted += 1
    return eidx


def _rewired_edge_index(model: str, net: SpatialSocialNetwork, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if model == "uniform":
        return _uniform_edge_sample(net.n, net.e, rng)
    return _swap_edges(net.edge_index, net.n, rng, target_swaps=10 * net.e)


def _as_network(net: SpatialSocialNetwork, edge_index: np.ndarray) -> SpatialSocialNetwork:
    edges = [EdgeRecord(net.nodes[int(u)].id, net.nodes[int(v)].id)
             for u, v in edge_index]
    return SpatialSocialNetwork(net.nodes, edges)


def rewire_uniform(net: SpatialSocialNetwork, seed) -> SpatialSocialNetwork:
    """Same nodes and positions; e edges redrawn uniformly from all pairs."""
    if net.n < 2:
        raise DegenerateNetwork("rewiring needs at least two nodes")
    return _as_network(net, _rewired_edge_index("uniform", net, seed))


def rewire_configuration(net: SpatialSocialNetwork, seed) -> SpatialSocialNetwork:
    """Same nodes and positions; edges shuffled by degree-preserving swaps."""
    return _as_network(net, _rewired_edge_index("configuration", net, seed))


@dataclass
class SignificanceReport:
    ids: tuple
    statistic: str
    observed: np.ndarray
    null_mean: np.ndarray
    null_sd: np.ndarray
    p: np.ndarray
    spec: NeighborhoodSpec
    ensemble: NullEnsembleSpec
    provenance: dict


def _stat_values(stat: str, m: np.ndarray, ec: np.ndarray, tri: np.ndarray) -> np.ndarray:
    if stat == "edge_count":
        return ec.astype(np.float64)
    if stat == "triads":
        return tri.astype(np.float64)
    if stat == "density":
        pairs = m * (m - 1)
        out = np.zeros(m.shape[0])
        np.divide(2.0 * ec, pairs, out=out, where=pairs > 0)
        return out
    triples = m * (m - 1) * (m - 2) // 6
    out = np.zeros(m.shape[0])
    np.divide(tri, triples, out=out, where=triples > 0)
    return out


def significance(net: SpatialSocialNetwork, index: PointIndex,
                 spec: NeighborhoodSpec, statistic: str,
                 ensemble: NullEnsembleSpec, workers: int = 1) -> SignificanceReport:
    """Per-node empirical p-values of a scan statistic against the null ensemble."""
    stat = resolve_statistic(statistic)
    if spec.kind == KNN and spec.k > net.n:
        raise SpecMismatch(f"knn k={spec.k} exceeds network size n={net.n}")
    n = net.n
    indptr, members = index.windows(spec, workers=workers)
    m, ec, tri = _kernels.window_stats(indptr, members, net.adj_indptr,
                                       net.adj_indices, n)
    observed = _stat_values(stat, m, ec, tri)

    reps = ensemble.replicates

    def run_chunk(lo: int, hi: int):
        count_ge = np.zeros(n, dtype=np.int64)
        total = np.zeros(n, dtype=np.float64)
        total_sq = np.zeros(n, dtype=np.float64)
        for rep in range(lo, hi):
            eidx = _rewired_edge_index(ensemble.model, net, [ensemble.seed, rep])
            aip, anb = adjacency_csr(n, eidx)
            _, e2, t2 = _kernels.window_stats(indptr, members, aip, anb, n)
            vals = _stat_values(stat, m, e2, t2)
            count_ge += vals >= observed
            total += vals
            total_sq += vals * vals
        return count_ge, total, total_sq

    chunks = [(s, min(s + _CHUNK, reps)) for s in range(0, reps, _CHUNK)]
    if workers <= 1 or len(chunks) <= 1:
        parts = [run_chunk(a, b) for a, b in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_chunk, a, b) for a, b in chunks]
            parts = [f.result() for f in futures]

    count_ge = np.zeros(n, dtype=np.int64)
    total = np.zeros(n, dtype=np.float64)
    total_sq = np.zeros(n, dtype=np.float64)
    for cg, t, tsq in parts:  # fixed chunk order: bitwise-stable reduction
        count_ge += cg
        total += t
        total_sq += tsq

    null_mean = total / reps
    null_var = np.maximum(total_sq / reps - null_mean * null_mean, 0.0)
    p = (1.0 + count_ge) / (1.0 + reps)
    provenance = {
        "engine_version": ENGINE_VERSION,
        "network_sha256": net.content_hash(),
        "spec": spec.describe(),
        "statistic": stat,
        "model": ensemble.model,
        "replicates": reps,
        "seed": ensemble.seed,
    }
    return SignificanceReport(
        ids=tuple(nd.id for nd in net.nodes),
        statistic=stat,
        observed=observed,
        null_mean=null_mean,
        null_sd=np.sqrt(null_var),
        p=p,
        spec=spec,
        ensemble=ensemble,
        provenance=provenance,
    )
