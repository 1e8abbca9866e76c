"""Command-line surface.

Subcommands: scan, sweep, sensitivity, gistar, compare, significance, synth.
Exit codes: 0 success, 1 validation error (including bad flags), 2 I/O error.
Diagnostics go to stderr; machine-readable output goes only to files.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io as io_mod
from .errors import SSNScanError
from .hotspot import GridSpec, compare_hotspots, gi_star, grid_counts, grid_gi_star, reduce_to_grid
from .model import KNN, NeighborhoodSpec
from .nullmodel import NullEnsembleSpec, significance
from .scan import run_scan_suite, scan
from .sensitivity import DEFAULT_SPEC_LADDER, node_variance, summarize, sweep
from .spatial import PointIndex

STAT_CHOICES = ("all", "edgescan", "ndscan", "triads", "transitivity")


class _Parser(argparse.ArgumentParser):
    # flag/usage errors are validation errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _add_network_args(p):
    p.add_argument("--nodes", required=True, help="node CSV (id,x,y[,label])")
    p.add_argument("--edges", required=True, help="edge CSV (source,target)")


def _add_workers(p):
    p.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")


def _add_index(p):
    p.add_argument("--index", choices=("grid", "kdtree", "brute"), default="grid",
                   help="spatial index backend (default grid)")


def _load(args):
    net = io_mod.load_network(args.nodes, args.edges)
    inputs = {"nodes": io_mod.file_sha256(args.nodes),
              "edges": io_mod.file_sha256(args.edges)}
    return net, inputs


def _build_parser() -> _Parser:
    parser = _Parser(prog="ssnscan",
                     description="Moving-window scan statistics for spatial social networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", parents=[], help="run window scans for one or more specs")
    _add_network_args(p)
    p.add_argument("--spec", action="append", required=True,
                   help="neighborhood spec, e.g. kind=euclidean,r=1000 or kind=knn,k=15 "
                        "(repeatable)")
    p.add_argument("--stat", choices=STAT_CHOICES, default="all")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("geojson", "csv"), default="geojson")
    _add_index(p)
    _add_workers(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("sweep", help="mean/st.dev of a statistic along a window-size ladder")
    _add_network_args(p)
    p.add_argument("--kind", choices=("euclidean", "manhattan", "knn"), required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--stat", choices=STAT_CHOICES[1:], default="edgescan")
    p.add_argument("--out", required=True)
    _add_index(p)
    _add_workers(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("sensitivity",
                       help="per-spec summaries and per-node variance across specs")
    _add_network_args(p)
    p.add_argument("--specs-file", help="one spec per line; defaults to the nine-spec ladder")
    p.add_argument("--out-summary", required=True)
    p.add_argument("--out-variance", required=True)
    _add_index(p)
    _add_workers(p)
    p.set_defaults(func=_cmd_sensitivity)

    p = sub.add_parser("gistar", help="Getis-Ord Gi* hot spot surface")
    _add_network_args(p)
    p.add_argument("--cell-size", type=float, default=1000.0)
    p.add_argument("--radius", type=float, default=1000.0)
    p.add_argument("--source", choices=("grid-counts", "ndscan", "edgescan"),
                   default="grid-counts")
    p.add_argument("--spec", default="kind=euclidean,r=1000",
                   help="scan spec when --source is ndscan/edgescan")
    p.add_argument("--origin", help="grid origin 'x,y' (default: snapped to cell size)")
    p.add_argument("--out", required=True)
    _add_index(p)
    _add_workers(p)
    p.set_defaults(func=_cmd_gistar)

    p = sub.add_parser("compare", help="hot spot overlap between two gistar layers")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("significance",
                       help="Monte Carlo p-values against a rewired null ensemble")
    _add_network_args(p)
    p.add_argument("--model", choices=("uniform", "configuration"), required=True)
    p.add_argument("--replicates", type=int, default=999)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--stat", choices=STAT_CHOICES[1:], default="ndscan")
    p.add_argument("--out", required=True)
    _add_index(p)
    _add_workers(p)
    p.set_defaults(func=_cmd_significance)

    p = sub.add_parser("synth", help="generate a synthetic network")
    p.add_argument("--config", required=True, help="flat key-value synth config")
    p.add_argument("--out-nodes", required=True)
    p.add_argument("--out-edges", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def _cmd_scan(args) -> int:
    net, inputs = _load(args)
    index = PointIndex(net, backend=args.index)
    specs = [NeighborhoodSpec.parse(s) for s in args.spec]
    entries = run_scan_suite(net, index, specs, workers=args.workers)
    failed = [e for e in entries if not e.ok]
    for e in failed:
        print(f"spec {e.spec.describe()} failed: {e.error}", file=sys.stderr)
    results = [e.result for e in entries if e.ok]
    if not results:
        raise SSNScanError("all specs failed")
    prov = io_mod.results_provenance(net, results, inputs=inputs)
    io_mod.write_results(net, results, args.out, fmt=args.format, stat=args.stat,
                         provenance=prov)
    return 0 if not failed else 1


def _cmd_sweep(args) -> int:
    net, _ = _load(args)
    index = PointIndex(net, backend=args.index)
    if args.kind == KNN:
        params = [int(v) for v in np.arange(args.start, args.stop + 1e-9, args.step)]
    else:
        params = [float(v) for v in np.arange(args.start, args.stop + 1e-9, args.step)]
    curve = sweep(net, index, args.kind, params, args.stat, workers=args.workers)
    io_mod.write_sweep_csv(curve, args.out)
    return 0


def _cmd_sensitivity(args) -> int:
    net, _ = _load(args)
    index = PointIndex(net, backend=args.index)
    specs = (io_mod.parse_specs_file(args.specs_file) if args.specs_file
             else list(DEFAULT_SPEC_LADDER))
    entries = run_scan_suite(net, index, specs, workers=args.workers)
    for e in entries:
        if not e.ok:
            print(f"spec {e.spec.describe()} failed: {e.error}", file=sys.stderr)
    results = [e.result for e in entries if e.ok]
    if not results:
        raise SSNScanError("all specs failed")
    io_mod.write_summary_csv(summarize(results), args.out_summary)
    rows = []
    if len(results) >= 2:
        for stat in ("edge_count", "density", "triads", "transitivity"):
            rows.extend(node_variance(results, stat))
    io_mod.write_variance_csv(rows, args.out_variance)
    return 0 if all(e.ok for e in entries) else 1


def _parse_origin(text):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise SSNScanError(f"--origin must be 'x,y', got {text!r}")
    return float(parts[0]), float(parts[1])


def _cmd_gistar(args) -> int:
    net, inputs = _load(args)
    origin = _parse_origin(args.origin)
    grid = GridSpec.covering(net.xs, net.ys, args.cell_size, origin=origin)
    prov = {"inputs": inputs, "source": args.source}
    if args.source == "grid-counts":
        counts = grid_counts(net, grid)
        surface = grid_gi_star(counts, args.radius)
        fc = io_mod.gistar_feature_collection(surface, provenance=prov)
    else:
        spec = NeighborhoodSpec.parse(args.spec)
        index = PointIndex(net, backend=args.index)
        res = scan(net, index, spec, workers=args.workers)
        values = res.statistic(args.source if args.source != "edgescan" else "edgescan")
        coords = np.column_stack([net.xs, net.ys])
        node_surface = gi_star(values, coords, args.radius)
        surface = reduce_to_grid(node_surface, grid)
        prov["spec"] = spec.describe()
        fc = io_mod.gistar_feature_collection(surface, provenance=prov,
                                              node_surface=node_surface)
    import json
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(fc, fh)
        fh.write("\n")
    return 0


def _cmd_compare(args) -> int:
    surface_a = io_mod.read_gistar_layer(args.a)
    surface_b = io_mod.read_gistar_layer(args.b)
    if surface_a.grid != surface_b.grid:
        from .errors import GridMismatch
        raise GridMismatch("the two layers use different grids")
    comparison = compare_hotspots(surface_a, surface_b, surface_a.grid)
    report = {
        "ncells": comparison.ncells,
        "levels": {
            str(level): {
                "both": ov.both, "a_only": ov.a_only, "b_only": ov.b_only,
                "neither": ov.neither,
                "jaccard": ov.jaccard,
            }
            for level, ov in comparison.levels.items()
        },
    }
    import json
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return 0


def _cmd_significance(args) -> int:
    net, inputs = _load(args)
    index = PointIndex(net, backend=args.index)
    spec = NeighborhoodSpec.parse(args.spec)
    ensemble = NullEnsembleSpec(args.model, args.replicates, args.seed)
    report = significance(net, index, spec, args.stat, ensemble, workers=args.workers)
    report.provenance["inputs"] = inputs
    io_mod.write_significance_csv(report, args.out)
    return 0


def _cmd_synth(args) -> int:
    spec = io_mod.parse_synthetic_config(args.config)
    from .synth import generate_synthetic
    net = generate_synthetic(spec)
    io_mod.save_network(net, args.out_nodes, args.out_edges)
    print(f"wrote {net.n} nodes, {net.e} edges", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SSNScanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
