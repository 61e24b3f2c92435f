"""Picture coordinates, quadrants and distances for the 546x290 stimulus."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import MissingCoordinate, OutOfBounds, SchemaError

IMAGE_WIDTH = 546
IMAGE_HEIGHT = 290


class Quadrant(str, Enum):
    """Image quadrants; y grows downward so TOP means small y."""

    TL = "TL"
    TR = "TR"
    BL = "BL"
    BR = "BR"

    @property
    def code(self) -> int:
        return _QUAD_CODES[self]


_QUAD_CODES = {Quadrant.TL: 0, Quadrant.TR: 1, Quadrant.BL: 2, Quadrant.BR: 3}


@dataclass(frozen=True)
class CoordinateTable:
    coords: dict[int, tuple[float, float]]
    width: float = IMAGE_WIDTH
    height: float = IMAGE_HEIGHT
    center: tuple[float, float] = field(default=(IMAGE_WIDTH / 2, IMAGE_HEIGHT / 2))

    def __post_init__(self):
        for cid, (x, y) in self.coords.items():
            if not (0 <= x <= self.width and 0 <= y <= self.height):
                raise SchemaError(f"coordinate for CIU {cid} ({x}, {y}) lies outside the image")

    def __getitem__(self, cid: int) -> tuple[float, float]:
        try:
            return self.coords[cid]
        except KeyError:
            raise MissingCoordinate(cid) from None

    def quadrant(self, cid: int) -> Quadrant:
        return quadrant_of(self[cid], self)

    def scaled(self, factor: float) -> "CoordinateTable":
        """Same layout with every length multiplied by ``factor``."""
        return CoordinateTable(
            {k: (x * factor, y * factor) for k, (x, y) in self.coords.items()},
            self.width * factor,
            self.height * factor,
            (self.center[0] * factor, self.center[1] * factor),
        )

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "center": list(self.center),
            "coords": {str(k): list(v) for k, v in sorted(self.coords.items())},
        }


def quadrant_of(p: tuple[float, float], table: CoordinateTable) -> Quadrant:
    """Quadrant of a pixel position; points on a split line go right/bottom."""
    x, y = p
    if not (0 <= x <= table.width and 0 <= y <= table.height):
        raise OutOfBounds(f"point ({x}, {y}) outside {table.width}x{table.height} image")
    cx, cy = table.center
    if y < cy:
        return Quadrant.TL if x < cx else Quadrant.TR
    return Quadrant.BL if x < cx else Quadrant.BR


def distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaError(f"{what} must be a finite number, got {value!r}")
    return float(value)


def load_coordinates(data: bytes | str, required=range(1, 24)) -> CoordinateTable:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"coordinate file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("coords"), dict):
        raise SchemaError("coordinate file needs a 'coords' object")
    width = _number(doc.get("width", IMAGE_WIDTH), "width")
    height = _number(doc.get("height", IMAGE_HEIGHT), "height")
    center = doc.get("center", [width / 2, height / 2])
    if not isinstance(center, list) or len(center) != 2:
        raise SchemaError("center must be [x, y]")
    coords = {}
    for key, value in doc["coords"].items():
        try:
            cid = int(key)
        except ValueError as exc:
            raise SchemaError(f"coordinate key {key!r} is not a CIU id") from exc
        if not isinstance(value, list) or len(value) != 2:
            raise SchemaError(f"coordinate for CIU {cid} must be [x, y]")
        coords[cid] = (_number(value[0], "x"), _number(value[1], "y"))
    missing = [c for c in required if c not in coords]
    if missing:
        raise SchemaError(f"coordinate file is missing CIUs {missing}")
    return CoordinateTable(coords, width, height, (_number(center[0], "cx"), _number(center[1], "cy")))


def load_coordinates_file(path: str | Path | None = None) -> CoordinateTable:
    if path is None:
        data = resources.files("ciugraph").joinpath("data/default_coords.json").read_bytes()
    else:
        data = Path(path).read_bytes()
    return load_coordinates(data)
