"""File formats: node/edge CSV ingestion, GeoJSON/CSV result layers, configs.

CSV layers start with ``#``-prefixed provenance comment lines (input hashes,
spec, engine version) so runs are reproducible from the artifact alone; the
readers here skip them.  GeoJSON layers carry the same block as a foreign
``provenance`` member.

Coordinates are echoed verbatim in the input's planar CRS. The GeoJSON
therefore intentionally violates the WGS84 convention; every layer carries a
``crs_note`` saying so.  Floats are serialized with 17 significant digits,
which round-trips float64 exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
from typing import Iterable

from .errors import DanglingEdge, DuplicateNodeId, ParseError, SelfLoop
from .model import EdgeRecord, NeighborhoodSpec, NodeRecord, SpatialSocialNetwork, build_network
from .scan import ENGINE_VERSION, STATISTICS, ScanResult
from .synth import ClusterSpec, SyntheticSpec

CRS_NOTE = ("coordinates are in the input's projected planar CRS (meters), "
            "not WGS84 lon/lat")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# -- node/edge ingestion -----------------------------------------------------

def _reader(path, required: tuple[str, ...]):
    fh = open(path, newline="", encoding="utf-8")
    rows = csv.reader(fh)
    try:
        header = next(rows)
    except StopIteration:
        fh.close()
        raise ParseError(path, 1, "missing header row") from None
    header = [h.strip().lower() for h in header]
    for col in required:
        if col not in header:
            fh.close()
            raise ParseError(path, 1, f"missing required column {col!r}")
    return fh, rows, {col: header.index(col) for col in header}


def load_network(node_path, edge_path) -> SpatialSocialNetwork:
    """Read node and edge CSVs and build the network.

    Node file columns: id, x, y, optional label.  Edge file columns:
    source, target.  Ids are matched as exact strings.  All validation
    failures report 1-based line numbers.
    """
    nodes = []
    ids = set()
    fh, rows, col = _reader(node_path, ("id", "x", "y"))
    with fh:
        label_col = col.get("label")
        for lineno, row in enumerate(rows, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                nid = row[col["id"]].strip()
                x = float(row[col["x"]])
                y = float(row[col["y"]])
            except (IndexError, ValueError) as exc:
                raise ParseError(node_path, lineno, f"bad node row: {exc}") from None
            if not nid:
                raise ParseError(node_path, lineno, "empty node id")
            if nid in ids:
                raise DuplicateNodeId(f"{node_path}:{lineno}: duplicate node id {nid!r}")
            ids.add(nid)
            label = None
            if label_col is not None and label_col < len(row):
                label = row[label_col].strip() or None
            nodes.append(NodeRecord(nid, x, y, label))

    edges = []
    fh, rows, col = _reader(edge_path, ("source", "target"))
    with fh:
        for lineno, row in enumerate(rows, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                a = row[col["source"]].strip()
                b = row[col["target"]].strip()
            except IndexError as exc:
                raise ParseError(edge_path, lineno, f"bad edge row: {exc}") from None
            if a == b:
                raise SelfLoop(f"{edge_path}:{lineno}: self-loop on {a!r}")
            for nid in (a, b):
                if nid not in ids:
                    raise DanglingEdge(
                        f"{edge_path}:{lineno}: edge references unknown node {nid!r}")
            edges.append(EdgeRecord(a, b))

    return build_network(nodes, edges)


def save_network(net: SpatialSocialNetwork, node_path, edge_path) -> None:
    with open(node_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "x", "y", "label"])
        for nd in net.nodes:
            w.writerow([nd.id, _fmt(nd.x), _fmt(nd.y), nd.label or ""])
    with open(edge_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "target"])
        for edge in net.edges:
            w.writerow([edge.a, edge.b])


# -- result layers -------------------------------------------------------------

RESULT_COLUMNS = ("m",) + STATISTICS


def _columns_for(stat: str) -> tuple[str, ...]:
    if stat == "all":
        return RESULT_COLUMNS
    from .scan import resolve_statistic
    return ("m", resolve_statistic(stat))


def results_provenance(net, results: Iterable[ScanResult], inputs: dict | None = None,
                       extra: dict | None = None) -> dict:
    prov = {
        "engine_version": ENGINE_VERSION,
        "network_sha256": net.content_hash(),
        "specs": [r.spec.describe() for r in results],
    }
    if inputs:
        prov["inputs"] = inputs
    if extra:
        prov.update(extra)
    return prov


def results_to_feature_collection(net, results: list[ScanResult], stat: str = "all",
                                  provenance: dict | None = None) -> dict:
    cols = _columns_for(stat)
    features = []
    for res in results:
        spec_desc = res.spec.describe()
        for i, nid in enumerate(res.ids):
            props = {"id": nid, "spec": spec_desc}
            for c in cols:
                v = getattr(res, c)[i]
                props[c] = int(v) if c in ("m", "edge_count", "triads") else float(v)
            features.append({
                "type": "Feature",
                "geometry": {"type": "Point",
                             "coordinates": [float(net.xs[i]), float(net.ys[i])]},
                "properties": props,
            })
    return {
        "type": "FeatureCollection",
        "crs_note": CRS_NOTE,
        "provenance": provenance or results_provenance(net, results),
        "features": features,
    }


def write_results(net, results: list[ScanResult], path, fmt: str = "geojson",
                  stat: str = "all", provenance: dict | None = None) -> None:
    """One layer for any number of specs; CSV and GeoJSON carry equal values."""
    if fmt == "geojson":
        fc = results_to_feature_collection(net, results, stat, provenance)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(fc, fh)
            fh.write("\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown result format {fmt!r}")
    cols = _columns_for(stat)
    prov = provenance or results_provenance(net, results)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, val in prov.items():
            fh.write(f"# {key}: {json.dumps(val)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "x", "y", "spec", *cols])
        for res in results:
            spec_desc = res.spec.describe()
            for i, nid in enumerate(res.ids):
                row = [nid, _fmt(float(net.xs[i])), _fmt(float(net.ys[i])), spec_desc]
                for c in cols:
                    v = getattr(res, c)[i]
                    row.append(str(int(v)) if c in ("m", "edge_count", "triads")
                               else _fmt(float(v)))
                w.writerow(row)


def read_result_values(path) -> dict:
    """Parse a result layer (either format) to {(spec, id): {column: value}}."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "{":
            fc = json.load(fh)
            for feat in fc["features"]:
                props = dict(feat["properties"])
                key = (props.pop("spec"), props.pop("id"))
                props["x"], props["y"] = feat["geometry"]["coordinates"]
                out[key] = props
            return out
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows)
        for row in rows:
            rec = dict(zip(header, row))
            key = (rec.pop("spec"), rec.pop("id"))
            parsed = {}
            for k, v in rec.items():
                parsed[k] = int(v) if k in ("m", "edge_count", "triads") else float(v)
            out[key] = parsed
        return out


# -- sensitivity / significance / sweep reports ---------------------------------

def write_summary_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["spec", "statistic", "mean", "st_dev", "zero_count", "zero_fraction"])
        for r in rows:
            w.writerow([r.spec.describe(), r.statistic, _fmt(r.mean), _fmt(r.st_dev),
                        r.zero_count, _fmt(r.zero_fraction)])


def write_variance_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "statistic", "variance"])
        for r in rows:
            w.writerow([r.node_id, r.statistic, _fmt(r.variance)])


def write_sweep_csv(curve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "statistic", "param", "mean", "st_dev"])
        for p, mean, sd in zip(curve.params, curve.means, curve.st_devs):
            w.writerow([curve.kind, curve.statistic, _fmt(p), _fmt(mean), _fmt(sd)])


def write_significance_csv(report, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, val in report.provenance.items():
            fh.write(f"# {key}: {json.dumps(val)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "observed", "null_mean", "null_sd", "p"])
        for i, nid in enumerate(report.ids):
            w.writerow([nid, _fmt(float(report.observed[i])),
                        _fmt(float(report.null_mean[i])),
                        _fmt(float(report.null_sd[i])),
                        _fmt(float(report.p[i]))])


# -- hotspot layers -----------------------------------------------------------

def gistar_feature_collection(surface, provenance: dict | None = None,
                              node_surface=None) -> dict:
    """Cell polygons (always) plus optional node points, with z and flags."""
    import numpy as np

    def _props(z):
        if np.isnan(z):
            return {"z": None, "hot90": False, "hot95": False, "hot99": False}
        return {"z": float(z), "hot90": bool(z >= 1.645), "hot95": bool(z >= 1.960),
                "hot99": bool(z >= 2.576)}

    features = []
    grid = surface.grid
    if grid is None:
        raise ValueError("cell surface required (reduce node surfaces first)")
    for idx in range(grid.ncells):
        row, coln = divmod(idx, grid.ncols)
        props = {"kind": "cell", "col": coln, "row": row}
        props.update(_props(surface.z[idx]))
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon",
                         "coordinates": [grid.cell_polygon(coln, row)]},
            "properties": props,
        })
    if node_surface is not None:
        for i in range(node_surface.z.shape[0]):
            props = {"kind": "node"}
            props.update(_props(node_surface.z[i]))
            features.append({
                "type": "Feature",
                "geometry": {"type": "Point",
                             "coordinates": [float(node_surface.coords[i, 0]),
                                             float(node_surface.coords[i, 1])]},
                "properties": props,
            })
    prov = dict(provenance or {})
    prov.update({
        "radius": surface.radius,
        "grid": {"x0": grid.x0, "y0": grid.y0, "cell_size": grid.cell_size,
                 "ncols": grid.ncols, "nrows": grid.nrows},
        "zero_variance": surface.zero_variance,
    })
    return {
        "type": "FeatureCollection",
        "crs_note": CRS_NOTE,
        "provenance": prov,
        "features": features,
    }


def read_gistar_layer(path):
    """Load a gistar GeoJSON layer back into a cell surface."""
    import numpy as np

    from .hotspot import GiStarSurface, GridSpec

    with open(path, encoding="utf-8") as fh:
        fc = json.load(fh)
    g = fc["provenance"]["grid"]
    grid = GridSpec(g["x0"], g["y0"], g["cell_size"], g["ncols"], g["nrows"])
    z = np.full(grid.ncells, np.nan)
    for feat in fc["features"]:
        props = feat["properties"]
        if props.get("kind") != "cell":
            continue
        idx = props["row"] * grid.ncols + props["col"]
        z[idx] = np.nan if props["z"] is None else float(props["z"])
    surface = GiStarSurface(grid.centroids(), z, float(fc["provenance"]["radius"]),
                            zero_variance=bool(fc["provenance"].get("zero_variance")))
    surface.grid = grid
    return surface


# -- flat key-value configs ------------------------------------------------------

def parse_kv_config(path) -> dict:
    """``key = value`` lines; '#' comments; repeated keys accumulate in a list."""
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(path, lineno, f"expected key = value, got {line!r}")
            key, _, val = line.partition("=")
            key = key.strip().lower()
            val = val.strip()
            if key in out:
                if not isinstance(out[key], list):
                    out[key] = [out[key]]
                out[key].append(val)
            else:
                out[key] = val
    return out


def parse_synthetic_config(path) -> SyntheticSpec:
    """Flat key-value synth config.

    Keys: n_background, bbox (xmin ymin xmax ymax), edge_p, seed, and any
    number of cluster lines (cx cy radius n edge_p).
    """
    cfg = parse_kv_config(path)
    try:
        bbox = tuple(float(v) for v in cfg["bbox"].split())
        if len(bbox) != 4:
            raise ValueError("bbox needs 4 numbers")
        clusters = []
        raw = cfg.get("cluster", [])
        for item in raw if isinstance(raw, list) else [raw]:
            parts = item.split()
            if len(parts) != 5:
                raise ValueError(f"cluster needs 5 numbers, got {item!r}")
            clusters.append(ClusterSpec(float(parts[0]), float(parts[1]),
                                        float(parts[2]), int(parts[3]),
                                        float(parts[4])))
        return SyntheticSpec(
            n_background=int(cfg["n_background"]),
            bbox=bbox,
            edge_p=float(cfg.get("edge_p", 0.0)),
            clusters=tuple(clusters),
            seed=int(cfg.get("seed", 0)),
        )
    except KeyError as exc:
        raise ParseError(path, 0, f"missing config key {exc}") from None
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def parse_specs_file(path) -> list[NeighborhoodSpec]:
    """One neighborhood spec per line, same syntax as the --spec flag.

    An optional ``spec =`` key prefix per line is accepted, so the file can
    be written in the same flat key-value style as the synth config.
    """
    specs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.lower().startswith("spec") and "=" in line:
                head, _, rest = line.partition("=")
                if head.strip().lower() == "spec":
                    line = rest.strip()
            specs.append(NeighborhoodSpec.parse(line))
    return specs
