"""Applying bistochastic matrices to data.

Categorical attributes are randomized record by record (randomized
response / PRAM): a record in category ``u`` is reported as ``v`` with
probability ``M[u, v]``. Numerical attributes treat the N individuals as
the categories, so the matrix is N x N and can be applied three ways:

``linear``
    ``y = M^T x``, the expected outcome. Mean preserving; a block-uniform
    matrix yields cluster means (microaggregation).
``permute``
    Draw one permutation from a Birkhoff decomposition of ``M`` and reorder
    the values with it. Output values are the original ones.
``sample``
    PRAM with individuals as categories: record ``i`` reports the value of
    individual ``v`` drawn from row ``i``.

All stochastic functions take ``rng``: a :class:`numpy.random.Generator`
or a seed accepted by :func:`numpy.random.default_rng`.
"""

from __future__ import annotations

import warnings
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .birkhoff import BirkhoffDecomposition, decompose, sample_permutation
from .entropy import PrivacyReport, conservative_report, joint_report
from .exceptions import (
    ColumnErrors,
    JointTooLarge,
    NegativeEstimateWarning,
    NonCategoricalColumn,
    NotStrictlyBistochastic,
    SingularMatrix,
    SizeMismatch,
    ValidationError,
)
from .matrix import BistochasticMatrix, check_distribution

__all__ = [
    "CategoricalColumn",
    "NumericalColumn",
    "Dataset",
    "randomize_categorical",
    "transform_numeric_linear",
    "transform_numeric_permute",
    "transform_numeric_sample",
    "estimate_frequencies",
    "empirical_distribution",
    "anonymize_conservative",
    "joint_randomize",
    "column_seed",
    "MODES",
]

MODES = ("sample", "linear", "permute")
DEFAULT_MAX_JOINT_SIZE = 4096
SINGULAR_COND = 1e12


@dataclass(frozen=True, eq=False)
class CategoricalColumn:
    name: str
    levels: tuple[str, ...]
    codes: np.ndarray

    kind = "categorical"

    def __post_init__(self):
        levels = tuple(str(v) for v in self.levels)
        if len(set(levels)) != len(levels):
            raise ValidationError(f"column {self.name!r}: duplicate level labels")
        codes = np.asarray(self.codes, dtype=np.int64).copy()
        if codes.ndim != 1:
            raise ValidationError(f"column {self.name!r}: codes must be a vector")
        if codes.size and (codes.min() < 0 or codes.max() >= len(levels)):
            raise ValidationError(f"column {self.name!r}: codes must lie in [0, {len(levels)})")
        codes.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_labels(cls, name, labels, levels=None) -> "CategoricalColumn":
        """Encode labels; levels default to first-appearance order."""
        labels = [str(v) for v in labels]
        if levels is None:
            levels = list(dict.fromkeys(labels))
        index = {lv: i for i, lv in enumerate(levels)}
        missing = [v for v in labels if v not in index]
        if missing:
            raise ValidationError(f"column {name!r}: unknown level {missing[0]!r}")
        return cls(name, tuple(levels), np.array([index[v] for v in labels], dtype=np.int64))

    @property
    def r(self) -> int:
        return len(self.levels)

    @property
    def labels(self) -> list[str]:
        return [self.levels[c] for c in self.codes]

    def __len__(self):
        return self.codes.size

    def __eq__(self, other):
        if not isinstance(other, CategoricalColumn):
            return NotImplemented
        return (self.name, self.levels) == (other.name, other.levels) and np.array_equal(self.codes, other.codes)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class NumericalColumn:
    name: str
    values: np.ndarray

    kind = "numerical"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).copy()
        if values.ndim != 1:
            raise ValidationError(f"column {self.name!r}: values must be a vector")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, NumericalColumn):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.values, other.values)

    __hash__ = None


AttributeColumn = CategoricalColumn | NumericalColumn


@dataclass(frozen=True)
class Dataset:
    columns: tuple[AttributeColumn, ...]

    def __post_init__(self):
        cols = tuple(self.columns)
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            raise ValidationError("column names must be unique")
        if len({len(c) for c in cols}) > 1:
            raise ValidationError("all columns must have the same number of records")
        object.__setattr__(self, "columns", cols)

    @property
    def record_count(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def __getitem__(self, name: str) -> AttributeColumn:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def __len__(self):
        return len(self.columns)


def _check_size(m: BistochasticMatrix, n: int, what: str) -> None:
    if m.size != n:
        raise SizeMismatch(f"matrix is {m.size}x{m.size} but {what} is {n}")
    if not m.is_strict:
        raise NotStrictlyBistochastic("apply the strictly bistochastic matrix, not an ergodicized one")


def _sample_rows(m: BistochasticMatrix, codes: np.ndarray, rng) -> np.ndarray:
    """For each code ``u``, draw ``v`` from row ``u`` by inverse CDF."""
    rng = np.random.default_rng(rng)
    cdf = np.cumsum(np.asarray(m.entries, dtype=float), axis=1)
    cdf /= cdf[:, -1:]
    uniforms = rng.random(codes.size)
    out = np.empty(codes.size, dtype=np.int64)
    for u in np.unique(codes):
        sel = codes == u
        out[sel] = np.searchsorted(cdf[u], uniforms[sel], side="right")
    np.minimum(out, m.size - 1, out=out)
    return out


def randomize_categorical(col: CategoricalColumn, m: BistochasticMatrix, rng=None) -> CategoricalColumn:
    _check_size(m, col.r, f"column {col.name!r} level count")
    return replace(col, codes=_sample_rows(m, col.codes, rng))


def transform_numeric_linear(col: NumericalColumn, m: BistochasticMatrix) -> NumericalColumn:
    _check_size(m, len(col), f"column {col.name!r} record count")
    return replace(col, values=np.asarray(m.entries).T @ col.values)


def transform_numeric_permute(
    col: NumericalColumn,
    m: BistochasticMatrix,
    rng=None,
    decomposition: BirkhoffDecomposition | None = None,
) -> NumericalColumn:
    """Reorder values with a permutation drawn from a Birkhoff decomposition of ``m``.

    With ``sigma`` drawn, ``y[sigma[i]] = x[i]``: this is ``P^T x`` for the
    permutation matrix ``P``. Pass ``decomposition`` to reuse one across
    calls.
    """
    _check_size(m, len(col), f"column {col.name!r} record count")
    d = decomposition if decomposition is not None else decompose(m)
    sigma = np.asarray(sample_permutation(d, rng))
    y = np.empty_like(col.values)
    y[sigma] = col.values
    return replace(col, values=y)


def transform_numeric_sample(col: NumericalColumn, m: BistochasticMatrix, rng=None) -> NumericalColumn:
    _check_size(m, len(col), f"column {col.name!r} record count")
    source = _sample_rows(m, np.arange(len(col)), rng)
    return replace(col, values=col.values[source])


def empirical_distribution(col: CategoricalColumn) -> np.ndarray:
    counts = np.bincount(col.codes, minlength=col.r).astype(float)
    return counts / max(counts.sum(), 1.0)


def estimate_frequencies(observed, m) -> np.ndarray:
    """Unbiased estimate of the original frequencies: solve ``M^T pi = lambda``.

    ``m`` may be any right-stochastic matrix, not only a bistochastic one.
    The raw solution is returned; negative components (sampling noise) are
    kept and reported through :class:`NegativeEstimateWarning`.

    Raises
    ------
    SingularMatrix
        When ``m`` is singular or numerically so, e.g. perfect secrecy, where
        nothing about the original distribution can be recovered.
    """
    a = np.asarray(m, dtype=float)
    lam = check_distribution(observed)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SizeMismatch(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] != lam.size:
        raise SizeMismatch(f"observed distribution has {lam.size} entries, matrix is {a.shape[0]}x{a.shape[0]}")
    if np.any(a < 0) or not np.allclose(a.sum(axis=1), 1.0, atol=1e-6):
        raise ValidationError("estimator needs a right-stochastic matrix")
    if np.linalg.cond(a) > SINGULAR_COND:
        raise SingularMatrix("estimator unavailable: matrix singular")
    try:
        pi = np.linalg.solve(a.T, lam)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("estimator unavailable: matrix singular") from exc
    if np.any(pi < 0):
        warnings.warn(
            f"frequency estimate has negative components {pi[pi < 0]!r}",
            NegativeEstimateWarning,
            stacklevel=2,
        )
    return pi


def column_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Independent sub-stream for column ``index`` of a run seeded with ``seed``."""
    return np.random.SeedSequence([int(seed), int(index)])


def _default_mode(col) -> str:
    return "sample" if col.kind == "categorical" else "linear"


def _per_column(values, ds: Dataset, what: str):
    if isinstance(values, Mapping):
        missing = [n for n in ds.names if n not in values]
        if missing:
            raise ValidationError(f"no {what} given for columns {missing}")
        return [values[n] for n in ds.names]
    values = list(values)
    if len(values) != len(ds):
        raise SizeMismatch(f"{len(values)} {what}s given for {len(ds)} columns")
    return values


def _anonymize_column(col, m: BistochasticMatrix, mode: str, seq: np.random.SeedSequence):
    rng = np.random.default_rng(seq)
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}")
    if col.kind == "categorical":
        if mode != "sample":
            raise ValidationError(f"mode {mode!r} applies to numerical columns only")
        return randomize_categorical(col, m, rng)
    if mode == "linear":
        return transform_numeric_linear(col, m)
    if mode == "permute":
        return transform_numeric_permute(col, m, rng)
    return transform_numeric_sample(col, m, rng)


def anonymize_conservative(
    ds: Dataset,
    matrices,
    modes=None,
    seed: int | None = None,
    n_jobs: int = 1,
) -> tuple[Dataset, PrivacyReport]:
    """Protect each column with its own matrix; report the aggregate beta.

    ``matrices`` and ``modes`` are sequences aligned with the columns or
    mappings keyed by column name. Missing modes default to ``sample`` for
    categorical and ``linear`` for numerical columns; a single string sets
    the mode of every numerical column. Column ``i`` draws
    from :func:`column_seed` ``(seed, i)``, so ``n_jobs > 1`` gives the same
    output as a serial run.
    """
    ms = _per_column(matrices, ds, "matrix")
    if modes is None:
        md = [_default_mode(c) for c in ds.columns]
    elif isinstance(modes, str):
        md = ["sample" if c.kind == "categorical" else modes for c in ds.columns]
    else:
        md = [_default_mode(c) if x is None else x for c, x in zip(ds.columns, _per_column(modes, ds, "mode"))]
    if seed is None:
        seed = np.random.SeedSequence().entropy

    def work(i):
        try:
            return _anonymize_column(ds.columns[i], ms[i], md[i], column_seed(seed, i))
        except Exception as exc:  # collected per column below
            return exc

    idx = range(len(ds))
    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(work, idx))
    else:
        results = [work(i) for i in idx]

    errors = {ds.columns[i].name: r for i, r in enumerate(results) if isinstance(r, Exception)}
    if errors:
        raise ColumnErrors(errors)
    report = conservative_report(ms, ds.names)
    return Dataset(tuple(results)), report


def joint_randomize(
    ds: Dataset,
    joint_matrix: BistochasticMatrix,
    rng=None,
    max_joint_size: int = DEFAULT_MAX_JOINT_SIZE,
) -> tuple[Dataset, PrivacyReport]:
    """Randomize the combination of all (categorical) columns as one category.

    Level tuples are encoded mixed-radix in column order, first column most
    significant, so a Kronecker product of per-column matrices (in the same
    order) acts column by column.
    """
    if not ds.columns:
        raise ValidationError("dataset has no columns")
    bad = [c.name for c in ds.columns if c.kind != "categorical"]
    if bad:
        raise NonCategoricalColumn(f"joint mode needs categorical columns; got numerical {bad}")
    dims = tuple(c.r for c in ds.columns)
    size = int(np.prod(dims, dtype=object))
    if size > max_joint_size:
        raise JointTooLarge(f"joint domain has {size} categories, cap is {max_joint_size}")
    _check_size(joint_matrix, size, "joint category count")

    joint = np.ravel_multi_index(tuple(c.codes for c in ds.columns), dims) if ds.record_count else np.zeros(0, int)
    out = _sample_rows(joint_matrix, np.asarray(joint, dtype=np.int64), rng)
    parts = np.unravel_index(out, dims)
    cols = tuple(replace(c, codes=p) for c, p in zip(ds.columns, parts))
    name = " x ".join(ds.names)
    return Dataset(cols), joint_report(joint_matrix, name)
