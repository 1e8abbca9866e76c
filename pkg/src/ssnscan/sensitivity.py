"""Sensitivity of scan results to the window definition.

Three views over a set of neighborhood specs:

* per-spec summary rows (mean, st.dev, zero counts) for each statistic,
* per-node variance of a statistic across the specs,
* sweep curves of mean/st.dev along a ladder of window sizes.

All dispersion statistics are population-style (divide by n): the scans
cover every node, so the values are a census, not a sample.  EdgeScan and
NDScan values are never mixed in one variance; each statistic keeps its own
scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyParams, InvalidSpec, MixedNetworks, TooFewSpecs
from .model import KNN, NeighborhoodSpec
from .scan import STATISTICS, ScanResult, resolve_statistic, scan

#: The standard nine-spec ladder: three sizes per neighborhood kind.
DEFAULT_SPEC_LADDER = (
    NeighborhoodSpec.euclidean(500.0),
    NeighborhoodSpec.euclidean(1000.0),
    NeighborhoodSpec.euclidean(2000.0),
    NeighborhoodSpec.manhattan(500.0),
    NeighborhoodSpec.manhattan(1000.0),
    NeighborhoodSpec.manhattan(2000.0),
    NeighborhoodSpec.knn(10),
    NeighborhoodSpec.knn(15),
    NeighborhoodSpec.knn(20),
)


@dataclass(frozen=True)
class SpecSummary:
    spec: NeighborhoodSpec
    statistic: str
    mean: float
    st_dev: float
    zero_count: int
    zero_fraction: float


@dataclass(frozen=True)
class NodeVariance:
    node_id: str
    statistic: str
    variance: float
    values: tuple


@dataclass(frozen=True)
class SweepCurve:
    kind: str
    statistic: str
    params: tuple
    means: tuple
    st_devs: tuple


def _check_same_network(results: list[ScanResult]):
    if not results:
        raise TooFewSpecs("no scan results supplied")
    hashes = {r.provenance.get("network_sha256") for r in results}
    if len(hashes) > 1:
        raise MixedNetworks("scan results come from different networks")


def summarize(results: list[ScanResult], statistics=STATISTICS) -> list[SpecSummary]:
    """One summary row per (spec, statistic): mean, population st.dev, zeros."""
    results = list(results)
    _check_same_network(results)
    rows = []
    for res in results:
        n = len(res)
        for stat in statistics:
            vals = res.statistic(stat)
            zeros = int(np.count_nonzero(vals == 0))
            rows.append(SpecSummary(
                spec=res.spec,
                statistic=stat,
                mean=float(np.mean(vals)) if n else 0.0,
                st_dev=float(np.std(vals)) if n else 0.0,
                zero_count=zeros,
                zero_fraction=zeros / n if n else 0.0,
            ))
    return rows


def node_variance(results: list[ScanResult], statistic: str) -> list[NodeVariance]:
    """Per-node population variance of one statistic across the supplied specs."""
    results = list(results)
    if len(results) < 2:
        raise TooFewSpecs("node variance needs at least two specs")
    _check_same_network(results)
    ids = results[0].ids
    for res in results[1:]:
        if res.ids != ids:
            raise MixedNetworks("scan results do not share a node set")
    stat = resolve_statistic(statistic)
    stack = np.vstack([res.statistic(stat).astype(np.float64) for res in results])
    variances = np.var(stack, axis=0)
    return [
        NodeVariance(nid, stat, float(variances[i]), tuple(float(v) for v in stack[:, i]))
        for i, nid in enumerate(ids)
    ]


def sweep(net, index, kind: str, params, statistic: str, workers: int = 1) -> SweepCurve:
    """Mean/st.dev of one statistic across all nodes, per window size."""
    params = list(params)
    if not params:
        raise EmptyParams("sweep needs at least one parameter value")
    if any(b <= a for a, b in zip(params, params[1:])):
        raise InvalidSpec("sweep parameters must be strictly increasing")
    stat = resolve_statistic(statistic)
    means = []
    st_devs = []
    for p in params:
        spec = NeighborhoodSpec.knn(int(p)) if kind == KNN else NeighborhoodSpec(kind, radius=float(p))
        vals = scan(net, index, spec, workers=workers).statistic(stat)
        means.append(float(np.mean(vals)))
        st_devs.append(float(np.std(vals)))
    return SweepCurve(kind, stat, tuple(params), tuple(means), tuple(st_devs))
