"""Birkhoff-von Neumann decomposition.

A bistochastic matrix is a convex combination of permutation matrices.
:func:`decompose` finds one such combination by greedy peeling: find a
perfect matching on the support, subtract the smallest matched entry along
it, repeat until nothing is left. Matchings are found with augmenting paths
(Kuhn's algorithm), warm-started from the previous round so that only the
rows whose matched entry vanished have to be re-matched.

Permutations are stored as tuples ``sigma`` with ``sigma[i]`` the column
used by row ``i``; the permutation matrix has ones at ``(i, sigma[i])``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    NoPerfectMatching,
    NotStrictlyBistochastic,
    ThresholdOutOfRange,
    ValidationError,
)
from .matrix import BistochasticMatrix

__all__ = [
    "BirkhoffDecomposition",
    "decompose",
    "recompose",
    "sample_permutation",
    "permutation_matrix",
    "max_terms",
]

DEFAULT_ZERO_THRESHOLD = 1e-12


def max_terms(r: int) -> int:
    """Upper bound on the number of permutations needed for an r x r matrix."""
    return r * r - 2 * r + 2


def permutation_matrix(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=int)
    p = np.zeros((sigma.size, sigma.size))
    p[np.arange(sigma.size), sigma] = 1.0
    return p


@dataclass(frozen=True)
class BirkhoffDecomposition:
    weights: tuple[float, ...]
    permutations: tuple[tuple[int, ...], ...]
    size: int

    def __post_init__(self):
        if len(self.weights) != len(self.permutations) or not self.weights:
            raise ValidationError("decomposition needs one weight per permutation and at least one term")
        for sigma in self.permutations:
            if sorted(sigma) != list(range(self.size)):
                raise ValidationError(f"{sigma!r} is not a permutation of 0..{self.size - 1}")
        if any(w <= 0 for w in self.weights):
            raise ValidationError("weights must be positive")

    @property
    def terms(self) -> list[tuple[float, tuple[int, ...]]]:
        return list(zip(self.weights, self.permutations))

    def __len__(self):
        return len(self.weights)

    def to_lines(self) -> str:
        """One ``weight; s0 s1 ... s(r-1)`` line per term."""
        return "".join(
            f"{w!r}; {' '.join(map(str, sigma))}\n" for w, sigma in zip(self.weights, self.permutations)
        )

    @classmethod
    def from_lines(cls, text: str) -> "BirkhoffDecomposition":
        weights, perms = [], []
        for line in text.splitlines():
            if not line.strip():
                continue
            w, _, rest = line.partition(";")
            weights.append(float(w))
            perms.append(tuple(int(t) for t in rest.split()))
        if not perms:
            raise ValidationError("empty decomposition")
        return cls(tuple(weights), tuple(perms), len(perms[0]))


def _admissible(row: np.ndarray, threshold: float) -> list[int]:
    # largest entries first, ties by lowest column
    cols = np.flatnonzero(row > threshold)
    return cols[np.argsort(-row[cols], kind="stable")].tolist()


def _augment(root, a, threshold, match_row, match_col) -> bool:
    """Match free row ``root``: its best free column if any, else an augmenting path."""
    candidates = _admissible(a[root], threshold)
    for c in candidates:
        if match_col[c] < 0:
            match_row[root] = c
            match_col[c] = root
            return True
    visited = np.zeros(a.shape[1], dtype=bool)
    stack = [(root, iter(candidates))]
    path: list[int] = []
    while stack:
        row, candidates = stack[-1]
        for c in candidates:
            if visited[c]:
                continue
            visited[c] = True
            owner = match_col[c]
            if owner < 0:
                for (rr, _), cc in zip(stack, path + [c]):
                    match_row[rr] = cc
                    match_col[cc] = rr
                return True
            path.append(c)
            stack.append((owner, iter(_admissible(a[owner], threshold))))
            break
        else:
            stack.pop()
            if path:
                path.pop()
    return False


def _reduce_terms(weights: list[float], perms: list[tuple[int, ...]], r: int):
    """Drop terms until at most ``max_terms(r)`` remain, keeping the sum fixed.

    Permutation matrices live in an affine space of dimension (r-1)^2, so
    any (r-1)^2 + 2 of them are affinely dependent; moving the weights along
    a dependency until one hits zero leaves the combination unchanged.
    """
    bound = max_terms(r)
    w = np.array(weights)
    perms = list(perms)
    while len(perms) > bound:
        k = bound + 1
        cols = [permutation_matrix(s).ravel() for s in perms[:k]]
        system = np.vstack([np.column_stack(cols), np.ones(k)])
        z = np.linalg.svd(system)[2][-1]
        if z.max() <= 0:
            z = -z
        pos = z > 1e-12
        ratios = np.where(pos, w[:k] / np.where(pos, z, 1.0), np.inf)
        j = int(np.argmin(ratios))
        w[:k] -= ratios[j] * z
        w[j] = 0.0
        keep = w > 0
        w = w[keep]
        perms = [s for s, kp in zip(perms, keep) if kp]
    return w.tolist(), perms


def decompose(m: BistochasticMatrix, zero_threshold: float = DEFAULT_ZERO_THRESHOLD) -> BirkhoffDecomposition:
    """Write ``m`` as a convex combination of permutation matrices.

    Deterministic. Entries at or below ``zero_threshold`` are treated as
    zero; peeling stops once no residual entry exceeds ``r * zero_threshold``.

    Raises
    ------
    NotStrictlyBistochastic
        For ergodicized matrices, which are not convex combinations of
        permutations.
    NoPerfectMatching
        When the residual support admits no perfect matching, i.e. the
        residual drifted away from a scaled bistochastic matrix.
    """
    if not m.is_strict:
        raise NotStrictlyBistochastic("decompose the matrix before ergodicizing it")
    if not 0 < zero_threshold <= 1e-6:
        raise ThresholdOutOfRange(f"zero_threshold must lie in (0, 1e-6], got {zero_threshold!r}")

    r = m.size
    a = np.array(m.entries, dtype=float)
    a[a <= zero_threshold] = 0.0
    match_row = np.full(r, -1)
    match_col = np.full(r, -1)
    rows = np.arange(r)
    weights: list[float] = []
    perms: list[tuple[int, ...]] = []

    while a.max() > r * zero_threshold:
        for i in range(r):
            if match_row[i] < 0 and not _augment(i, a, zero_threshold, match_row, match_col):
                raise NoPerfectMatching(
                    f"no perfect matching on the residual support after {len(perms)} terms "
                    f"(residual mass {a.sum():.3g})"
                )
        lam = float(a[rows, match_row].min())
        a[rows, match_row] -= lam
        weights.append(lam)
        perms.append(tuple(int(c) for c in match_row))

        gone = a[rows, match_row] <= zero_threshold
        a[rows[gone], match_row[gone]] = 0.0
        match_col[match_row[gone]] = -1
        match_row[gone] = -1

    if not perms:
        raise NoPerfectMatching("matrix has no entry above the zero threshold")
    weights, perms = _reduce_terms(weights, perms, r)
    return BirkhoffDecomposition(tuple(weights), tuple(perms), r)


def recompose(d: BirkhoffDecomposition) -> np.ndarray:
    out = np.zeros((d.size, d.size))
    rows = np.arange(d.size)
    for w, sigma in d.terms:
        out[rows, list(sigma)] += w
    return out


def sample_permutation(d: BirkhoffDecomposition, rng=None) -> tuple[int, ...]:
    """Draw term ``j`` with probability ``weights[j]`` and return its permutation.

    ``rng`` is a :class:`numpy.random.Generator` or anything
    :func:`numpy.random.default_rng` accepts.
    """
    rng = np.random.default_rng(rng)
    w = np.asarray(d.weights)
    j = int(rng.choice(w.size, p=w / w.sum()))
    return d.permutations[j]
