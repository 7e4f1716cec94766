"""scikit-learn compatible wrappers.

:class:`CategoricalRandomizer` runs randomized response / PRAM on
categorical feature columns, and :class:`NumericalBistochasticTransformer`
applies N x N matrices to numerical columns of N records. Both expose
``privacy_report_`` and ``beta_`` after ``fit``, so they can sit in a
:class:`sklearn.pipeline.Pipeline` while keeping the privacy accounting.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .birkhoff import decompose
from .entropy import conservative_report
from .exceptions import SizeMismatch, ValidationError
from .matrix import BistochasticMatrix, validate
from .pram import (
    CategoricalColumn,
    NumericalColumn,
    column_seed,
    estimate_frequencies,
    randomize_categorical,
    transform_numeric_linear,
    transform_numeric_permute,
    transform_numeric_sample,
)

__all__ = ["CategoricalRandomizer", "NumericalBistochasticTransformer"]


def _as_matrix(m) -> BistochasticMatrix:
    return m if isinstance(m, BistochasticMatrix) else validate(m)


def _matrices_for(matrices, n_features: int) -> list[BistochasticMatrix]:
    if isinstance(matrices, (list, tuple)):
        if len(matrices) != n_features:
            raise SizeMismatch(f"{len(matrices)} matrices given for {n_features} features")
        return [_as_matrix(m) for m in matrices]
    m = _as_matrix(matrices)
    return [m] * n_features


def _seed_for(random_state, j: int):
    if random_state is None:
        return None
    if isinstance(random_state, np.random.Generator):
        return random_state
    return column_seed(int(random_state), j)


class CategoricalRandomizer(TransformerMixin, BaseEstimator):
    """Randomized response with bistochastic matrices, one per feature.

    Parameters
    ----------
    matrices : BistochasticMatrix, array-like or list of them
        A single matrix is used for every feature.
    categories : "auto" or list of array-like
        Level order per feature. ``"auto"`` sorts the unique values seen in
        ``fit``, like :class:`~sklearn.preprocessing.OrdinalEncoder`.
    random_state : int, numpy Generator or None
        An integer seeds feature ``j`` with the sub-stream ``(seed, j)``.
    """

    def __init__(self, matrices=None, categories="auto", random_state=None):
        self.matrices = matrices
        self.categories = categories
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=None)
        n_features = X.shape[1]
        if isinstance(self.categories, str) and self.categories == "auto":
            cats = [np.unique(X[:, j]) for j in range(n_features)]
        else:
            cats = [np.asarray(c) for c in self.categories]
            if len(cats) != n_features:
                raise SizeMismatch(f"{len(cats)} category lists for {n_features} features")
        if self.matrices is None:
            raise ValidationError("matrices must be set before fit")
        ms = _matrices_for(self.matrices, n_features)
        for j, (m, c) in enumerate(zip(ms, cats)):
            if m.size != len(c):
                raise SizeMismatch(f"feature {j} has {len(c)} categories but its matrix is {m.size}x{m.size}")
        self.categories_ = cats
        self.matrices_ = ms
        self.n_features_in_ = n_features
        self.privacy_report_ = conservative_report(ms, [f"x{j}" for j in range(n_features)])
        self.beta_ = self.privacy_report_.aggregate_beta
        return self

    def _codes(self, X, j) -> np.ndarray:
        cats = self.categories_[j]
        lookup = {v: i for i, v in enumerate(cats.tolist())}
        try:
            return np.array([lookup[v] for v in X[:, j].tolist()], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"feature {j}: unknown category {exc.args[0]!r}") from None

    def _check(self, X):
        check_is_fitted(self, "matrices_")
        X = check_array(X, dtype=None)
        if X.shape[1] != self.n_features_in_:
            raise SizeMismatch(f"X has {X.shape[1]} features, fitted with {self.n_features_in_}")
        return X

    def transform(self, X):
        X = self._check(X)
        out = np.empty(X.shape, dtype=object)
        for j in range(X.shape[1]):
            cats = self.categories_[j]
            col = CategoricalColumn(f"x{j}", tuple(map(str, cats)), self._codes(X, j))
            res = randomize_categorical(col, self.matrices_[j], _seed_for(self.random_state, j))
            out[:, j] = cats[res.codes]
        try:
            return out.astype(np.result_type(*self.categories_))
        except TypeError:
            return out

    def estimate_frequencies(self, X) -> list[np.ndarray]:
        """Estimate original category frequencies from randomized ``X``."""
        X = self._check(X)
        out = []
        for j in range(X.shape[1]):
            counts = np.bincount(self._codes(X, j), minlength=len(self.categories_[j]))
            out.append(estimate_frequencies(counts / counts.sum(), self.matrices_[j].entries))
        return out


class NumericalBistochasticTransformer(TransformerMixin, BaseEstimator):
    """Apply N x N bistochastic matrices to numerical columns of N records.

    The records themselves are the categories, so the transformer is
    transductive: ``transform`` accepts only inputs with exactly N rows.

    Parameters
    ----------
    matrices : BistochasticMatrix, array-like or list of them
    mode : {"linear", "permute", "sample"}
        ``linear`` returns ``M^T x``; ``permute`` reorders each column with a
        permutation sampled from a Birkhoff decomposition of ``M``;
        ``sample`` does PRAM with records as categories.
    random_state : int, numpy Generator or None
    """

    def __init__(self, matrices=None, mode="linear", random_state=None):
        self.matrices = matrices
        self.mode = mode
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if self.mode not in ("linear", "permute", "sample"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.matrices is None:
            raise ValidationError("matrices must be set before fit")
        ms = _matrices_for(self.matrices, X.shape[1])
        for j, m in enumerate(ms):
            if m.size != X.shape[0]:
                raise SizeMismatch(f"feature {j}: matrix is {m.size}x{m.size} but X has {X.shape[0]} rows")
        self.matrices_ = ms
        self.n_features_in_ = X.shape[1]
        self.n_records_ = X.shape[0]
        self.decompositions_ = [decompose(m) for m in ms] if self.mode == "permute" else None
        self.privacy_report_ = conservative_report(ms, [f"x{j}" for j in range(X.shape[1])])
        self.beta_ = self.privacy_report_.aggregate_beta
        return self

    def transform(self, X):
        check_is_fitted(self, "matrices_")
        X = check_array(X, dtype=float)
        if X.shape != (self.n_records_, self.n_features_in_):
            raise SizeMismatch(f"X has shape {X.shape}, fitted on {(self.n_records_, self.n_features_in_)}")
        out = np.empty_like(X)
        for j in range(X.shape[1]):
            col = NumericalColumn(f"x{j}", X[:, j])
            m = self.matrices_[j]
            rng = _seed_for(self.random_state, j)
            if self.mode == "linear":
                res = transform_numeric_linear(col, m)
            elif self.mode == "permute":
                res = transform_numeric_permute(col, m, rng, self.decompositions_[j])
            else:
                res = transform_numeric_sample(col, m, rng)
            out[:, j] = res.values
        return out
