"""Shared fixtures and independent reference implementations.

The brute-force helpers here are deliberately written against the raw edge
list with plain Python containers, so they share no code path with the scan
kernels they verify.
"""

from itertools import combinations

import pytest

from ssnscan.model import EdgeRecord, NodeRecord, build_network

FIVE_POINTS = [("A", 0.0, 0.0), ("B", 300.0, 0.0), ("C", 0.0, 400.0),
               ("D", 2000.0, 0.0), ("E", 300.0, 300.0)]
FIVE_EDGES = [("A", "B"), ("A", "C"), ("B", "C"), ("A", "D"), ("D", "E")]


def make_network(points, edges):
    return build_network([NodeRecord(i, x, y) for i, x, y in points],
                         [EdgeRecord(a, b) for a, b in edges])


@pytest.fixture
def five_node_net():
    return make_network(FIVE_POINTS, FIVE_EDGES)


def random_network(rng, n, extent=10000.0, edge_p=None, n_edges=None):
    """Uniform random points with either Bernoulli or exact-count random edges."""
    xs = rng.uniform(0, extent, size=n)
    ys = rng.uniform(0, extent, size=n)
    nodes = [NodeRecord(f"n{i:04d}", float(xs[i]), float(ys[i])) for i in range(n)]
    pairs = list(combinations(range(n), 2))
    if n_edges is not None:
        chosen = rng.choice(len(pairs), size=min(n_edges, len(pairs)), replace=False)
        picked = [pairs[i] for i in sorted(chosen)]
    else:
        mask = rng.random(len(pairs)) < (edge_p if edge_p is not None else 0.05)
        picked = [p for p, keep in zip(pairs, mask) if keep]
    edges = [EdgeRecord(nodes[u].id, nodes[v].id) for u, v in picked]
    return build_network(nodes, edges)


# -- independent scan oracle ---------------------------------------------------

def brute_window(net, focal_id, spec):
    """Window membership by exhaustive pairwise comparison on raw coordinates."""
    pos = {nd.id: (nd.x, nd.y) for nd in net.nodes}
    fx, fy = pos[focal_id]
    if spec.kind == "knn":
        ranked = sorted(
            ((pos[i][0] - fx) ** 2 + (pos[i][1] - fy) ** 2, str(i), i)
            for i in pos if i != focal_id)
        return {focal_id} | {i for _, _, i in ranked[:spec.k - 1]}
    members = {focal_id}
    for i, (x, y) in pos.items():
        dx, dy = x - fx, y - fy
        if spec.kind == "euclidean":
            if dx * dx + dy * dy <= spec.radius * spec.radius:
                members.add(i)
        else:
            if abs(dx) + abs(dy) <= spec.radius:
                members.add(i)
    return members


def brute_scan_values(net, spec):
    """Exhaustive per-node statistics straight from the edge list.

    Edge counts filter the raw edge list; triads enumerate all C(m, 3)
    member triples.  Returns {id: (m, edge_count, density, triads,
    transitivity)}.
    """
    edge_set = {frozenset((e.a, e.b)) for e in net.edges}
    out = {}
    for nd in net.nodes:
        members = brute_window(net, nd.id, spec)
        m = len(members)
        ec = sum(1 for e in net.edges if e.a in members and e.b in members)
        density = 2 * ec / (m * (m - 1)) if m >= 2 else 0.0
        tri = 0
        for a, b, c in combinations(sorted(members, key=str), 3):
            if (frozenset((a, b)) in edge_set and frozenset((a, c)) in edge_set
                    and frozenset((b, c)) in edge_set):
                tri += 1
        possible = m * (m - 1) * (m - 2) // 6
        trans = tri / possible if possible else 0.0
        out[nd.id] = (m, ec, density, tri, trans)
    return out
