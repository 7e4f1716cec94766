"""Entropy rates and beta privacy levels.

The entropy rate of a bistochastic matrix is taken under its uniform
stationary distribution, which makes it the plain average of the row
entropies (in bits). ``beta`` divides that by ``log2 r``, the rate of the
perfect-secrecy matrix of the same size.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateSize, SizeMismatch, ValidationError
from .matrix import BistochasticMatrix

__all__ = [
    "shannon_entropy",
    "entropy_rate",
    "beta",
    "budget_bits",
    "conservative_beta",
    "joint_beta",
    "dp_epsilon_bound",
    "AttributePrivacy",
    "PrivacyReport",
    "univariate_report",
    "conservative_report",
    "joint_report",
]


def shannon_entropy(p) -> float:
    """Entropy in bits of a probability vector, with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def _row_entropies(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(a > 0, a * np.log2(np.where(a > 0, a, 1.0)), 0.0)
    return -terms.sum(axis=1)


def entropy_rate(m: BistochasticMatrix) -> float:
    """Entropy rate in bits: ``-sum_uv mu_u p_uv log2 p_uv`` with ``mu_u = 1/r``.

    Rows of an ergodicized matrix (``super_slack > 0``) are renormalized to
    sum to one before their entropy is taken.
    """
    a = np.asarray(m.entries, dtype=float)
    if m.super_slack > 0:
        a = a / a.sum(axis=1, keepdims=True)
    h = float(_row_entropies(a).mean())
    return max(h, 0.0)


def budget_bits(sizes: Sequence[int]) -> float:
    """Maximum number of bits injectable into attributes of the given sizes."""
    sizes = list(sizes)
    if any(int(n) != n or n < 1 for n in sizes):
        raise ValidationError(f"sizes must be positive integers, got {sizes!r}")
    return float(sum(math.log2(n) for n in sizes))


def beta(m: BistochasticMatrix) -> float:
    if m.size < 2:
        raise DegenerateSize("beta is undefined for a 1x1 matrix (zero-bit budget)")
    return min(entropy_rate(m) / math.log2(m.size), 1.0)


def conservative_beta(matrices: Sequence[BistochasticMatrix]) -> float:
    """Summed entropy rates over summed budgets, one matrix per attribute."""
    matrices = list(matrices)
    if not matrices:
        raise ValidationError("conservative_beta needs at least one matrix")
    if any(m.size < 2 for m in matrices):
        raise DegenerateSize("every attribute needs at least 2 categories")
    total = sum(entropy_rate(m) for m in matrices)
    return min(total / budget_bits([m.size for m in matrices]), 1.0)


def joint_beta(m: BistochasticMatrix, joint_size: int) -> float:
    if m.size != joint_size:
        raise SizeMismatch(f"joint matrix is {m.size}x{m.size} but joint size is {joint_size}")
    return beta(m)


def dp_epsilon_bound(m: BistochasticMatrix) -> float:
    """Smallest epsilon for which the matrix, used as randomized response, is epsilon-DP.

    ``ln max_u (max_v p_uv / min_v p_uv)``; infinite when a row mixes zeros
    with positive entries.
    """
    a = np.asarray(m.entries, dtype=float)
    hi = a.max(axis=1)
    lo = a.min(axis=1)
    if np.any((lo == 0) & (hi > 0)):
        return math.inf
    return max(float(np.max(np.log(hi) - np.log(lo))), 0.0)


@dataclass(frozen=True)
class AttributePrivacy:
    name: str
    entropy_bits: float
    budget_bits: float
    beta: float


@dataclass(frozen=True)
class PrivacyReport:
    """Per-attribute entropy accounting plus an aggregate beta.

    ``mode`` is ``"univariate"``, ``"conservative"`` or ``"joint"``.
    """

    per_attribute: tuple[AttributePrivacy, ...]
    aggregate_beta: float
    mode: str
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def total_entropy_bits(self) -> float:
        return sum(a.entropy_bits for a in self.per_attribute)

    @property
    def total_budget_bits(self) -> float:
        return sum(a.budget_bits for a in self.per_attribute)

    def to_text(self, precision: int | None = None) -> str:
        """Human-readable report, beta shown as a percentage.

        Percentages are rounded to integers unless ``precision`` asks for
        more digits.
        """
        digits = 0 if precision is None else precision
        lines = [f"mode: {self.mode}"]
        width = max([len(a.name) for a in self.per_attribute] + [9])
        lines.append(f"{'attribute':<{width}}  {'H(P) bits':>10}  {'budget bits':>11}  {'beta':>8}")
        for a in self.per_attribute:
            lines.append(
                f"{a.name:<{width}}  {a.entropy_bits:>10.4f}  {a.budget_bits:>11.4f}  "
                f"{100 * a.beta:>7.{digits}f}%"
            )
        lines.append(f"aggregate beta: {100 * self.aggregate_beta:.{digits}f}%")
        return "\n".join(lines) + "\n"

    def to_keyvalue(self) -> str:
        """Machine-readable ``key=value`` lines at full float precision."""
        out = [f"mode={self.mode}", f"aggregate_beta={self.aggregate_beta!r}"]
        for i, a in enumerate(self.per_attribute):
            out += [
                f"attribute.{i}.name={a.name}",
                f"attribute.{i}.entropy_bits={a.entropy_bits!r}",
                f"attribute.{i}.budget_bits={a.budget_bits!r}",
                f"attribute.{i}.beta={a.beta!r}",
            ]
        for k, v in self.extra.items():
            out.append(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}")
        return "\n".join(out) + "\n"


def _attribute(name: str, m: BistochasticMatrix) -> AttributePrivacy:
    h = entropy_rate(m)
    b = math.log2(m.size)
    return AttributePrivacy(name, h, b, min(h / b, 1.0) if b > 0 else 0.0)


def univariate_report(m: BistochasticMatrix, name: str = "attribute") -> PrivacyReport:
    return PrivacyReport((_attribute(name, m),), beta(m), "univariate")


def conservative_report(matrices: Sequence[BistochasticMatrix], names: Sequence[str] | None = None) -> PrivacyReport:
    matrices = list(matrices)
    names = list(names) if names is not None else [f"attribute_{i}" for i in range(len(matrices))]
    if len(names) != len(matrices):
        raise SizeMismatch("one name per matrix required")
    attrs = tuple(_attribute(n, m) for n, m in zip(names, matrices))
    return PrivacyReport(attrs, conservative_beta(matrices), "conservative")


def joint_report(m: BistochasticMatrix, name: str = "joint") -> PrivacyReport:
    return PrivacyReport((_attribute(name, m),), joint_beta(m, m.size), "joint")
