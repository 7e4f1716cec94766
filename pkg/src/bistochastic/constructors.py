"""Named parameterizations of bistochastic matrices.

All builders return validated :class:`~bistochastic.matrix.BistochasticMatrix`
objects with ``super_slack == 0``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    AlphaConstraintViolated,
    InvalidEpsilon,
    InvalidPartition,
    InvalidProbability,
    InvalidSize,
)
from .matrix import BistochasticMatrix, check_distribution, validate

__all__ = [
    "AnatomyPartition",
    "dp_matrix",
    "perfect_secrecy_matrix",
    "anatomy_matrix",
    "circulant_matrix",
    "constant_circulant",
    "tridiagonal_matrix",
    "contiguous_partition",
    "product_matrix",
]

# constructor outputs are exact up to float rounding
_TOL = 1e-12


@dataclass(frozen=True)
class AnatomyPartition:
    """Disjoint classes of record indices covering ``0..n-1``."""

    classes: tuple[tuple[int, ...], ...]

    def __init__(self, classes: Sequence[Sequence[int]]):
        classes = tuple(tuple(int(i) for i in c) for c in classes)
        if not classes or any(len(c) == 0 for c in classes):
            raise InvalidPartition("partition needs at least one class and no empty classes")
        flat = [i for c in classes for i in c]
        n = len(flat)
        if len(set(flat)) != n:
            raise InvalidPartition("classes overlap")
        if set(flat) != set(range(n)):
            raise InvalidPartition(f"classes do not cover 0..{n - 1}")
        object.__setattr__(self, "classes", classes)

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)

    def __len__(self):
        return len(self.classes)


def contiguous_partition(n: int, k: int) -> AnatomyPartition:
    """Split ``0..n-1`` into consecutive classes of size ``k``.

    When ``k`` does not divide ``n`` the last class absorbs the remainder,
    so every class has at least ``k`` members.
    """
    if n < 1 or k < 1 or k > n:
        raise InvalidPartition(f"cannot split {n} records into classes of size {k}")
    starts = list(range(0, n - k + 1, k))
    classes = [list(range(s, s + k)) for s in starts]
    classes[-1].extend(range(starts[-1] + k, n))
    return AnatomyPartition(classes)


def dp_matrix(r: int, epsilon: float) -> BistochasticMatrix:
    """Randomized-response matrix that is epsilon-differentially private.

    Diagonal entries are ``e^eps / (r - 1 + e^eps)``; every off-diagonal
    entry is ``1 / (r - 1 + e^eps)``.
    """
    if int(r) != r or r < 2:
        raise InvalidSize(f"dp_matrix needs r >= 2, got {r!r}")
    if not (math.isfinite(epsilon) and epsilon >= 0):
        raise InvalidEpsilon(f"epsilon must be finite and >= 0, got {epsilon!r}")
    r = int(r)
    e = math.exp(epsilon)
    denom = r - 1 + e
    a = np.full((r, r), 1.0 / denom)
    np.fill_diagonal(a, e / denom)
    return validate(a, tolerance=_TOL)


def perfect_secrecy_matrix(r: int) -> BistochasticMatrix:
    if int(r) != r or r < 1:
        raise InvalidSize(f"perfect secrecy matrix needs r >= 1, got {r!r}")
    r = int(r)
    return validate(np.full((r, r), 1.0 / r), tolerance=_TOL)


def anatomy_matrix(partition: AnatomyPartition | Sequence[Sequence[int]]) -> BistochasticMatrix:
    """Block matrix that is uniform (``1/n_l``) inside each class, zero across classes."""
    if not isinstance(partition, AnatomyPartition):
        partition = AnatomyPartition(partition)
    n = partition.n
    a = np.zeros((n, n))
    for cls in partition.classes:
        idx = np.asarray(cls)
        a[np.ix_(idx, idx)] = 1.0 / len(cls)
    return validate(a, tolerance=_TOL)


def circulant_matrix(first_row) -> BistochasticMatrix:
    """Row ``i`` is ``first_row`` rotated right by ``i`` positions."""
    row = check_distribution(first_row)
    r = row.size
    idx = (np.arange(r)[None, :] - np.arange(r)[:, None]) % r
    return validate(row[idx], tolerance=_TOL)


def constant_circulant(r: int, p_diag: float) -> BistochasticMatrix:
    """Circulant matrix with ``p_diag`` on the diagonal and equal mass elsewhere."""
    if int(r) != r or r < 2:
        raise InvalidSize(f"constant_circulant needs r >= 2, got {r!r}")
    if not 0 <= p_diag <= 1:
        raise InvalidProbability(f"p_diag must lie in [0, 1], got {p_diag!r}")
    r = int(r)
    row = np.full(r, (1.0 - p_diag) / (r - 1))
    row[0] = p_diag
    return circulant_matrix(row)


def tridiagonal_matrix(alphas) -> BistochasticMatrix:
    """Symmetric tridiagonal matrix from its ``r - 1`` off-diagonal values.

    Entry ``(i, i+1)`` and ``(i+1, i)`` is ``alphas[i]``; the diagonal takes
    whatever mass makes each row sum to one. Adjacent parameters must
    satisfy ``alphas[i-1] + alphas[i] <= 1``.
    """
    al = np.atleast_1d(np.asarray(alphas, dtype=float))
    if al.ndim != 1:
        raise InvalidSize("alphas must be a vector")
    for i, x in enumerate(al):
        if not (math.isfinite(x) and 0 <= x <= 1):
            raise AlphaConstraintViolated(i, f"alpha[{i}] = {x!r} outside [0, 1]")
    for i in range(1, al.size):
        if al[i - 1] + al[i] > 1 + _TOL:
            raise AlphaConstraintViolated(i, f"alpha[{i - 1}] + alpha[{i}] = {al[i - 1] + al[i]!r} > 1")
    r = al.size + 1
    a = np.diag(al, 1) + np.diag(al, -1)
    a[np.diag_indices(r)] = np.clip(1.0 - a.sum(axis=1), 0.0, None)
    return validate(a, tolerance=_TOL)


def product_matrix(matrices: Sequence[BistochasticMatrix]) -> BistochasticMatrix:
    """Kronecker product of per-attribute matrices, first factor most significant.

    This is the joint matrix of attributes randomized independently.
    """
    matrices = list(matrices)
    if not matrices:
        raise InvalidSize("product_matrix needs at least one matrix")
    a = np.ones((1, 1))
    for m in matrices:
        a = np.kron(a, np.asarray(m.entries))
    return validate(a, tolerance=1e-10)
