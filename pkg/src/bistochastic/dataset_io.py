"""Reading and writing datasets as comma-separated text.

A dataset file has a header row of column names followed by one record
per line. Which columns are categorical and which numerical comes from a
schema, stored as JSON::

    {"columns": [
        {"name": "color", "kind": "categorical", "levels": ["red", "green", "blue"]},
        {"name": "age", "kind": "numerical"}
    ]}

``levels`` is optional; without it levels are inferred in order of first
appearance. Missing values are not supported.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import IoFailure, MissingColumn, UnknownLevel, UnparseableCell, ValidationError
from .pram import CategoricalColumn, Dataset, NumericalColumn

__all__ = [
    "ColumnSpec",
    "SchemaSpec",
    "load_schema",
    "save_schema",
    "load_dataset",
    "save_dataset",
    "schema_of",
]

KINDS = ("categorical", "numerical")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str
    levels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"column {self.name!r}: kind must be one of {KINDS}, got {self.kind!r}")
        if self.levels is not None:
            levels = tuple(str(v) for v in self.levels)
            if len(set(levels)) != len(levels):
                raise ValidationError(f"column {self.name!r}: duplicate levels in schema")
            if self.kind != "categorical":
                raise ValidationError(f"column {self.name!r}: only categorical columns take levels")
            object.__setattr__(self, "levels", levels)


@dataclass(frozen=True)
class SchemaSpec:
    columns: tuple[ColumnSpec, ...]

    def __post_init__(self):
        cols = tuple(self.columns)
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            raise ValidationError("schema column names must be unique")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_dict(cls, data) -> "SchemaSpec":
        try:
            entries = data["columns"]
            return cls(tuple(ColumnSpec(e["name"], e["kind"], e.get("levels")) for e in entries))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed schema: {exc}") from None

    def to_dict(self) -> dict:
        out = []
        for c in self.columns:
            d = {"name": c.name, "kind": c.kind}
            if c.levels is not None:
                d["levels"] = list(c.levels)
            out.append(d)
        return {"columns": out}


def schema_of(ds: Dataset, with_levels: bool = True) -> SchemaSpec:
    return SchemaSpec(
        tuple(
            ColumnSpec(c.name, c.kind, c.levels if (with_levels and c.kind == "categorical") else None)
            for c in ds.columns
        )
    )


def load_schema(path) -> SchemaSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return SchemaSpec.from_dict(data)


def save_schema(schema: SchemaSpec, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(schema.to_dict(), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc


def _parse_float(text: str, row: int, col: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise UnparseableCell(row, col, text) from None
    if not math.isfinite(v):
        raise UnparseableCell(row, col, text)
    return v


def load_dataset(path, schema: SchemaSpec) -> Dataset:
    """Load the schema's columns from ``path``, in schema order.

    Row numbers in errors count data rows from 1 (the header is row 0).
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    if not rows:
        raise ValidationError(f"{path}: empty file, expected a header row")
    header, body = rows[0], rows[1:]
    index = {name: j for j, name in enumerate(header)}
    for spec in schema.columns:
        if spec.name not in index:
            raise MissingColumn(f"{path}: column {spec.name!r} not in header {header!r}")
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise ValidationError(f"{path}: row {i} has {len(row)} fields, header has {len(header)}")

    columns = []
    for spec in schema.columns:
        j = index[spec.name]
        cells = [row[j] for row in body]
        for i, cell in enumerate(cells, start=1):
            if cell == "":
                raise UnparseableCell(i, spec.name, cell)
        if spec.kind == "numerical":
            values = np.array([_parse_float(c, i, spec.name) for i, c in enumerate(cells, start=1)])
            columns.append(NumericalColumn(spec.name, values))
            continue
        levels = list(spec.levels) if spec.levels is not None else list(dict.fromkeys(cells))
        lookup = {lv: k for k, lv in enumerate(levels)}
        codes = np.empty(len(cells), dtype=np.int64)
        for i, cell in enumerate(cells):
            try:
                codes[i] = lookup[cell]
            except KeyError:
                raise UnknownLevel(i + 1, spec.name, cell) from None
        columns.append(CategoricalColumn(spec.name, tuple(levels), codes))
    return Dataset(tuple(columns))


def _cells(col) -> list[str]:
    if col.kind == "categorical":
        return col.labels
    return [repr(float(v)) for v in col.values]


def save_dataset(ds: Dataset, path) -> None:
    """Write ``ds`` with a header row; floats use their shortest exact repr."""
    columns = [_cells(c) for c in ds.columns]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(ds.names)
            writer.writerows(zip(*columns))
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
