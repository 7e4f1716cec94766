"""Majorization, the action of bistochastic matrices on distributions, and
reverse mapping of anonymized attributes onto original values."""

from __future__ import annotations

import numpy as np

from .exceptions import LengthMismatch, NotStrictlyBistochastic, SizeMismatch
from .matrix import BistochasticMatrix, check_distribution

__all__ = [
    "majorizes",
    "apply_to_distribution",
    "reverse_map",
    "find_majorization_violation",
]

MAJORIZATION_TOLERANCE = 1e-12


def majorizes(x, y, tol: float = MAJORIZATION_TOLERANCE) -> bool:
    """True if ``x`` majorizes ``y``: sorted-descending prefix sums of x dominate those of y."""
    x = check_distribution(x)
    y = check_distribution(y)
    if x.size != y.size:
        raise LengthMismatch(f"lengths differ: {x.size} vs {y.size}")
    cx = np.cumsum(np.sort(x)[::-1])
    cy = np.cumsum(np.sort(y)[::-1])
    return bool(np.all(cx >= cy - tol))


def apply_to_distribution(m: BistochasticMatrix, p) -> np.ndarray:
    """Distribution of the reported category: ``M^T p``."""
    if not m.is_strict:
        raise NotStrictlyBistochastic("apply_to_distribution needs a strictly bistochastic matrix")
    p = check_distribution(p)
    if p.size != m.size:
        raise SizeMismatch(f"distribution has {p.size} entries, matrix is {m.size}x{m.size}")
    q = np.asarray(m.entries).T @ p
    return np.clip(q, 0.0, None)


def reverse_map(original, anonymized) -> np.ndarray:
    """Reverse-map ``original`` onto the rank order of ``anonymized``.

    ``z[i]`` is the value of ``original`` whose rank equals the rank of
    ``anonymized[i]``. Ties in either input are ranked by position, so the
    result is always a permutation of ``original``.
    """
    x = np.asarray(original)
    y = np.asarray(anonymized)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"shapes differ: {x.shape} vs {y.shape}")
    x_sorted = x[np.argsort(x, kind="stable")]
    ranks = np.empty(y.size, dtype=int)
    ranks[np.argsort(y, kind="stable")] = np.arange(y.size)
    return x_sorted[ranks]


def find_majorization_violation(matrix, n_trials: int = 100, rng=None):
    """Search for a distribution ``p`` with ``M^T p`` not majorized by ``p``.

    ``matrix`` is any right-stochastic matrix (rows sum to one). Returns the
    first violating ``p`` found, or ``None``. For bistochastic matrices no
    violation exists. Candidates are Dirichlet draws with a random
    concentration, so both peaked and nearly flat ``p`` are tried.
    """
    a = np.asarray(matrix, dtype=float)
    r = a.shape[0]
    rng = np.random.default_rng(rng)
    for _ in range(n_trials):
        p = rng.dirichlet(np.full(r, 10 ** rng.uniform(-1, 2)))
        q = a.T @ p
        q = q / q.sum()
        if not majorizes(p, q):
            return p
    return None
