"""The twelve spatio-semantic features of a CIU walk."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import _kernels
from .errors import SchemaError
from .graph import QuadrantGraph, SpatioSemanticGraph

# row order used for statistics tables
FEATURE_NAMES = (
    "avg_x",
    "std_x",
    "avg_y",
    "std_y",
    "total_path",
    "path_per_unique",
    "self_cycles",
    "cycles",
    "nodes",
    "self_cycles_quad",
    "cross_ratio_quad",
    "unique_nodes",
)

FEATURE_TITLES = {
    "avg_x": "Avg. X",
    "std_x": "Std. X",
    "avg_y": "Avg. Y",
    "std_y": "Std. Y",
    "total_path": "Total path distance",
    "path_per_unique": "Total path/Unique nodes",
    "self_cycles": "Self cycles",
    "cycles": "Cycles",
    "nodes": "Nodes",
    "self_cycles_quad": "Self cycles (Quadrants)",
    "cross_ratio_quad": "Cross ratio (quadrants)",
    "unique_nodes": "Unique nodes",
}

_INT_FIELDS = {"unique_nodes", "nodes", "self_cycles", "cycles", "self_cycles_quad"}


@dataclass(frozen=True)
class FeatureVector:
    avg_x: float | None = None
    std_x: float | None = None
    avg_y: float | None = None
    std_y: float | None = None
    total_path: float | None = None
    unique_nodes: int | None = None
    path_per_unique: float | None = None
    nodes: int = 0
    self_cycles: int | None = None
    cycles: int | None = None
    self_cycles_quad: int | None = None
    cross_ratio_quad: float | None = None
    transcript_id: str = ""

    @property
    def is_empty(self) -> bool:
        return self.nodes == 0

    def get(self, name: str):
        return getattr(self, name)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


CSV_COLUMNS = ("transcript_id",) + tuple(f.name for f in fields(FeatureVector) if f.name != "transcript_id")


def compute_features(g: SpatioSemanticGraph, q: QuadrantGraph) -> FeatureVector:
    """Feature vector for a walk graph and its quadrant graph.

    An empty walk gives ``nodes=0`` with every other feature ``None``.
    """
    if len(q.sequence) != len(g.sequence):
        raise ValueError("graph and quadrant graph come from different sequences")
    if not g.sequence:
        return FeatureVector(transcript_id=g.transcript_id)
    size = max(g.sequence) + 1
    xs = np.zeros(size)
    ys = np.zeros(size)
    quads = np.zeros(size, dtype=np.int64)
    for cid, (x, y) in g.nodes.items():
        xs[cid] = x
        ys[cid] = y
    for cid, quad in zip(g.sequence, q.sequence):
        quads[cid] = quad.code
    seq = np.asarray(g.sequence, dtype=np.int64)
    n, unique, mx, sx, my, sy, total, self_cycles, self_quad, cross, intra = _kernels.walk_stats(seq, xs, ys, quads)
    return FeatureVector(
        avg_x=mx,
        std_x=sx,
        avg_y=my,
        std_y=sy,
        total_path=total,
        unique_nodes=unique,
        path_per_unique=total / unique,
        nodes=n,
        self_cycles=self_cycles,
        cycles=n - unique,
        self_cycles_quad=self_quad,
        cross_ratio_quad=cross / intra if intra else None,
        transcript_id=g.transcript_id,
    )


def _cell(name: str, value) -> str:
    if value is None:
        return ""
    if name == "transcript_id" or name in _INT_FIELDS:
        return str(value)
    return f"{value:.6g}"


def features_csv(rows: list[FeatureVector], sort: bool = True) -> str:
    """CSV with one row per transcript; sorted by id unless ``sort=False``."""
    if sort:
        rows = sorted(rows, key=lambda r: r.transcript_id)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(c, getattr(row, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_features_csv(text: str) -> list[FeatureVector]:
    reader = csv.DictReader(io.StringIO(text))
    missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise SchemaError(f"features CSV is missing columns {sorted(missing)}")
    out = []
    for rec in reader:
        kwargs = {}
        for name in CSV_COLUMNS:
            raw = rec[name]
            if name == "transcript_id":
                kwargs[name] = raw
            elif raw == "":
                kwargs[name] = 0 if name == "nodes" else None
            elif name in _INT_FIELDS:
                kwargs[name] = int(raw)
            else:
                value = float(raw)
                kwargs[name] = value if math.isfinite(value) else None
        out.append(FeatureVector(**kwargs))
    return out
