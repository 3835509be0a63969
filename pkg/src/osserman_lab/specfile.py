"""Manifold spec files: JSON descriptions of metrics and product metrics.

A file either gives a coordinate metric

    {"name": "...", "kind": "coordinate", "dimension": n,
     "signature": [1, ...], "metric": [["expr", ...], ...],
     "box": [[lo, hi], ...]}

or a product of two coordinate metrics

    {"name": "...", "kind": "direct" | "warped" | "twisted",
     "base": {coordinate spec}, "fiber": {coordinate spec},
     "function": "expr over the joint chart",
     "box": [[lo, hi], ...]}          # joint chart, base coords first

Expression strings use the x1..xn grammar of :mod:`osserman_lab.expr`.
Validation failures carry the JSON path of the offending field.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Union

from .expr import ExprSyntaxError, parse
from .linalg import Signature
from .metric import MetricField
from .products import ProductSpec

__all__ = [
    "SpecFileError",
    "load_manifold",
    "load_manifold_file",
    "preset_names",
    "load_preset",
]

KINDS = ("coordinate", "direct", "warped", "twisted")


class SpecFileError(ValueError):
    def __init__(self, message: str, path: str = ""):
        where = f" at {path}" if path else ""
        super().__init__(f"{message}{where}")
        self.path = path


def _need(data: dict, key: str, path: str):
    if key not in data:
        raise SpecFileError(f"missing required field '{key}'", path or "top level")
    return data[key]


def _parse_box(raw, dimension: int, path: str):
    if not isinstance(raw, list) or len(raw) != dimension:
        raise SpecFileError(f"box must list {dimension} intervals", path)
    box = []
    for k, pair in enumerate(raw):
        if (not isinstance(pair, list)) or len(pair) != 2:
            raise SpecFileError("each interval must be [lo, hi]", f"{path}[{k}]")
        lo, hi = pair
        if not (isinstance(lo, (int, float)) and isinstance(hi, (int, float)) and lo < hi):
            raise SpecFileError("interval must satisfy lo < hi", f"{path}[{k}]")
        box.append((float(lo), float(hi)))
    return tuple(box)


def _parse_coordinate(data: dict, path: str, allow_box: bool = True) -> MetricField:
    dim = _need(data, "dimension", path)
    if not isinstance(dim, int) or not 1 <= dim <= 8:
        raise SpecFileError("dimension must be an integer in 1..8", f"{path}.dimension")
    sig_raw = _need(data, "signature", path)
    if not isinstance(sig_raw, list) or len(sig_raw) != dim or any(s not in (1, -1) for s in sig_raw):
        raise SpecFileError(f"signature must be a list of {dim} entries from {{1, -1}}",
                            f"{path}.signature")
    rows = _need(data, "metric", path)
    if not isinstance(rows, list) or len(rows) != dim or any(
        not isinstance(r, list) or len(r) != dim for r in rows
    ):
        raise SpecFileError(f"metric must be a {dim}x{dim} grid of expression strings",
                            f"{path}.metric")
    grid = []
    for i in range(dim):
        row = []
        for j in range(dim):
            cell_path = f"{path}.metric[{i}][{j}]"
            if not isinstance(rows[i][j], str):
                raise SpecFileError("metric entries are expression strings", cell_path)
            try:
                row.append(parse(rows[i][j], dim))
            except ExprSyntaxError as err:
                raise SpecFileError(f"bad expression: {err}", cell_path) from None
        grid.append(tuple(row))
    for i in range(dim):
        for j in range(i + 1, dim):
            if grid[i][j] != grid[j][i]:
                raise SpecFileError(
                    f"metric must be symmetric: entries [{i}][{j}] and [{j}][{i}] differ",
                    f"{path}.metric",
                )
    box = ()
    if allow_box and "box" in data:
        box = _parse_box(data["box"], dim, f"{path}.box")
    return MetricField(
        dim,
        Signature(tuple(sig_raw)),
        tuple(grid),
        provenance="coordinate",
        box=box,
        name=str(data.get("name", "")),
    )


def load_manifold(data: dict, name_hint: str = "") -> Union[MetricField, ProductSpec]:
    """Validate a spec dictionary and build the metric or product spec."""
    if not isinstance(data, dict):
        raise SpecFileError("spec must be a JSON object", "top level")
    kind = _need(data, "kind", "")
    if kind not in KINDS:
        raise SpecFileError(f"kind must be one of {KINDS}, got '{kind}'", "kind")
    name = str(data.get("name", name_hint))
    if kind == "coordinate":
        metric = _parse_coordinate(data, "")
        metric.name = name or metric.name
        if metric.dimension < 2:
            raise SpecFileError("a manifold needs dimension >= 2", "dimension")
        return metric
    for side in ("base", "fiber"):
        sub = _need(data, side, "")
        if not isinstance(sub, dict):
            raise SpecFileError(f"'{side}' must be a coordinate sub-spec", side)
        if sub.get("kind") != "coordinate":
            raise SpecFileError("product factors must have kind 'coordinate'", f"{side}.kind")
    base = _parse_coordinate(data["base"], "base", allow_box=False)
    fiber = _parse_coordinate(data["fiber"], "fiber", allow_box=False)
    n = base.dimension + fiber.dimension
    if n > 8:
        raise SpecFileError(f"joint dimension {n} exceeds 8", "")
    function = None
    if kind in ("warped", "twisted"):
        raw = _need(data, "function", "")
        if not isinstance(raw, str):
            raise SpecFileError("function must be an expression string", "function")
        try:
            function = parse(raw, n)
        except ExprSyntaxError as err:
            raise SpecFileError(f"bad expression: {err}", "function") from None
    elif "function" in data:
        raise SpecFileError("a direct product takes no function", "function")
    if "box" in data:
        box = _parse_box(data["box"], n, "box")
        base.box = box[: base.dimension]
        fiber.box = box[base.dimension :]
    if "dimension" in data and data["dimension"] != n:
        raise SpecFileError(f"declared dimension {data['dimension']} != {n}", "dimension")
    try:
        return ProductSpec(kind, base, fiber, function, name=name)
    except ValueError as err:
        raise SpecFileError(str(err)) from None


def load_manifold_file(path) -> Union[MetricField, ProductSpec]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise SpecFileError(f"not valid JSON: {err}", str(path)) from None
    except OSError as err:
        raise SpecFileError(f"cannot read file: {err}", str(path)) from None
    return load_manifold(data, name_hint=path.stem)


def preset_names() -> list:
    files = resources.files("osserman_lab").joinpath("presets")
    return sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> Union[MetricField, ProductSpec]:
    files = resources.files("osserman_lab").joinpath("presets")
    entry = files.joinpath(f"{name}.json")
    if not entry.is_file():
        known = ", ".join(preset_names())
        raise SpecFileError(f"unknown preset '{name}'; available: {known}")
    data = json.loads(entry.read_text(encoding="utf-8"))
    return load_manifold(data, name_hint=name)
