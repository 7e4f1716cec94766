"""Validated bistochastic matrices.

:class:`BistochasticMatrix` is the single currency the rest of the package
accepts. Instances are only produced by :func:`validate` (directly or via
the constructors), so holding one means the row and column sums were
checked.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    ColumnSumViolation,
    GammaOutOfRange,
    IoFailure,
    NegativeEntry,
    NonFiniteEntry,
    NotADistribution,
    NotSquare,
    RowSumViolation,
    ValidationError,
)

DEFAULT_TOLERANCE = 1e-9
FILE_TOLERANCE = 1e-6
DISTRIBUTION_TOLERANCE = 1e-9
MAX_GAMMA = 1e-3

__all__ = [
    "BistochasticMatrix",
    "validate",
    "check_distribution",
    "is_diagonally_dominant",
    "is_strictly_positive",
    "ergodicize",
    "load_matrix",
    "read_matrix_text",
    "save_matrix",
    "format_matrix",
]


@dataclass(frozen=True, eq=False)
class BistochasticMatrix:
    """Square nonnegative matrix with unit row and column sums.

    ``super_slack`` is the excess above 1 that row/column sums were allowed
    to reach; it is 0 for strictly bistochastic matrices and positive for
    ergodicized ("super doubly stochastic") ones.
    """

    entries: np.ndarray = field(repr=False)
    tolerance: float = DEFAULT_TOLERANCE
    super_slack: float = 0.0

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def is_strict(self) -> bool:
        return self.super_slack == 0.0

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries.copy() if copy else self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, BistochasticMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __repr__(self):
        return f"BistochasticMatrix(size={self.size}, super_slack={self.super_slack:g})"


def validate(entries, tolerance: float = DEFAULT_TOLERANCE, super_slack: float = 0.0) -> BistochasticMatrix:
    """Check ``entries`` and wrap it as a :class:`BistochasticMatrix`.

    Rows are checked before columns, so a matrix violating both reports the
    first offending row.

    Raises
    ------
    NotSquare, NegativeEntry, RowSumViolation, ColumnSumViolation
    """
    if not tolerance > 0:
        raise ValidationError(f"tolerance must be positive, got {tolerance!r}")
    if not super_slack >= 0:
        raise ValidationError(f"super_slack must be nonnegative, got {super_slack!r}")

    a = np.array(entries, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NotSquare(a.shape)

    bad = np.argwhere(~np.isfinite(a))
    if bad.size:
        raise NonFiniteEntry(*map(int, bad[0]))
    neg = np.argwhere(a < 0)
    if neg.size:
        i, j = map(int, neg[0])
        raise NegativeEntry(i, j, float(a[i, j]))

    lo, hi = 1.0 - tolerance, 1.0 + super_slack + tolerance
    rows = a.sum(axis=1)
    for i, s in enumerate(rows):
        if not lo <= s <= hi:
            raise RowSumViolation(i, float(s))
    cols = a.sum(axis=0)
    for j, s in enumerate(cols):
        if not lo <= s <= hi:
            raise ColumnSumViolation(j, float(s))

    a.setflags(write=False)
    return BistochasticMatrix(a, float(tolerance), float(super_slack))


def check_distribution(p, tolerance: float = DISTRIBUTION_TOLERANCE) -> np.ndarray:
    """Return ``p`` as a float vector, raising if it is not a probability vector."""
    v = np.asarray(p, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise NotADistribution(f"expected a nonempty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise NotADistribution("entries must be finite and nonnegative")
    total = v.sum()
    if abs(total - 1.0) > tolerance:
        raise NotADistribution(f"entries sum to {total!r}, not 1")
    return v


def is_diagonally_dominant(m: BistochasticMatrix) -> bool:
    """Sufficient nonsingularity test: every diagonal entry strictly above 0.5."""
    return bool(np.all(np.diag(m.entries) > 0.5))


def is_strictly_positive(m: BistochasticMatrix) -> bool:
    return bool(np.all(m.entries > 0))


def ergodicize(m: BistochasticMatrix, gamma: float) -> BistochasticMatrix:
    """Replace every zero entry by ``gamma`` without renormalizing.

    The result is super doubly stochastic: row and column sums may exceed 1
    by up to ``size * gamma``, which is recorded in ``super_slack``.
    Strictly positive inputs are returned unchanged.
    """
    if not 0 < gamma <= MAX_GAMMA:
        raise GammaOutOfRange(f"gamma must lie in (0, {MAX_GAMMA}], got {gamma!r}")
    if is_strictly_positive(m):
        return m
    a = np.where(m.entries == 0, gamma, m.entries)
    return validate(a, tolerance=m.tolerance, super_slack=m.super_slack + m.size * gamma)


def format_matrix(m) -> str:
    a = np.asarray(m, dtype=float)
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in a)


def save_matrix(m, path) -> None:
    """Write one comma-separated row per line, full float precision."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_matrix(m))
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc


def read_matrix_text(path) -> np.ndarray:
    """Parse a matrix file without any stochasticity check."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as exc:
        raise IoFailure(f"{os.fspath(path)}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise ValidationError(f"{os.fspath(path)}: line {lineno} is not a row of numbers") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise NotSquare((len(rows), max((len(r) for r in rows), default=0)))
    return np.array(rows)


def load_matrix(path, tolerance: float = FILE_TOLERANCE, super_slack: float = 0.0) -> BistochasticMatrix:
    return validate(read_matrix_text(path), tolerance=tolerance, super_slack=super_slack)
