"""Graph and field files.

Graph files come in two layouts and the loader accepts both:

* a single JSON document with keys ``version, vertexCount, family,
  parameters, markers, frontier, coordinates, edges`` where ``edges`` is a
  list of ``[u, v, weight]`` (this is what :func:`write_graph` emits);
* a one-line JSON header with the same metadata keys followed by one edge
  per line as ``u v weight``.

Field files are ``{"graphHash": ..., "values": [...], "support": [...]}``,
``support`` optional. Keys are written in a stable order.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .calculus import ScalarField
from .errors import FracsobError, GraphFileError
from .graph import WeightedGraph, build_graph

FORMAT_VERSION = 1


def graph_to_dict(g: WeightedGraph) -> dict:
    return {
        "version": FORMAT_VERSION,
        "vertexCount": g.vertex_count,
        "family": g.family,
        "parameters": g.parameters,
        "markers": {
            "center": g.markers.get("center"),
            "corners": list(g.markers.get("corners", [])),
        },
        "frontier": list(g.frontier),
        "coordinates": None if g.coordinates is None else g.coordinates.tolist(),
        "edges": [[u, v, w] for u, v, w in g.edges()],
    }


def dumps_graph(g: WeightedGraph) -> str:
    return json.dumps(graph_to_dict(g), separators=(",", ":")) + "\n"


def write_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(dumps_graph(g), encoding="utf-8")


def _from_header(header: dict, edges, source: str) -> WeightedGraph:
    for key in ("vertexCount", "family"):
        if key not in header:
            raise GraphFileError(f"{source}: header lacks {key!r}")
    if header.get("version", FORMAT_VERSION) != FORMAT_VERSION:
        raise GraphFileError(f"{source}: unsupported format version {header.get('version')}")
    markers = header.get("markers") or {}
    try:
        return build_graph(
            edges,
            int(header["vertexCount"]),
            coordinates=header.get("coordinates"),
            frontier=header.get("frontier") or (),
            family=header["family"],
            parameters=header.get("parameters") or {},
            markers={"center": markers.get("center"), "corners": list(markers.get("corners") or [])},
        )
    except FracsobError as exc:
        raise GraphFileError(f"{source}: {exc}") from exc


def loads_graph(text: str, source: str = "<string>") -> WeightedGraph:
    stripped = text.strip()
    if not stripped:
        raise GraphFileError(f"{source}: file is empty")
    try:
        doc = json.loads(stripped)
    except json.JSONDecodeError:
        doc = None
    if isinstance(doc, dict):
        if "edges" not in doc:
            raise GraphFileError(f"{source}: JSON document has no 'edges' array")
        return _from_header(doc, doc["edges"], source)

    lines = stripped.splitlines()
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"{source}:1: header is not valid JSON ({exc.msg})") from exc
    if not isinstance(header, dict):
        raise GraphFileError(f"{source}:1: header must be a JSON object")
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) != 3:
            raise GraphFileError(f"{source}:{lineno}: expected 'u v weight', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise GraphFileError(f"{source}:{lineno}: {exc}") from exc
    return _from_header(header, edges, source)


def read_graph(path) -> WeightedGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise GraphFileError(f"{path}: {exc}") from exc
    return loads_graph(text, str(path))


def field_digest(values) -> str:
    arr = np.ascontiguousarray(values, dtype="<f8")
    return hashlib.sha256(arr.tobytes()).hexdigest()[:16]


def write_field(g: WeightedGraph, f: ScalarField, path) -> None:
    doc = {"graphHash": g.digest, "values": f.values.tolist()}
    if f.support is not None:
        doc["support"] = f.support.tolist()
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")


def read_field(path, g: WeightedGraph) -> ScalarField:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphFileError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or "values" not in doc:
        raise GraphFileError(f"{path}: field file needs a 'values' array")
    if doc.get("graphHash") not in (None, g.digest):
        raise GraphFileError(f"{path}: field belongs to a different graph")
    if len(doc["values"]) != g.vertex_count:
        raise GraphFileError(
            f"{path}: field has {len(doc['values'])} values, graph has {g.vertex_count} vertices"
        )
    try:
        return ScalarField(doc["values"], doc.get("support"))
    except FracsobError as exc:
        raise GraphFileError(f"{path}: {exc}") from exc
