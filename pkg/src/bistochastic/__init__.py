"""Bistochastic privacy.

Protect data with bistochastic matrices and measure the protection in bits:
the entropy rate of the matrix, relative to its maximum ``log2 r``, is the
privacy level ``beta`` (0 leaves data untouched, 1 is perfect secrecy).
"""

__version__ = "0.1.0"

from .birkhoff import BirkhoffDecomposition, decompose, recompose, sample_permutation
from .constructors import (
    AnatomyPartition,
    anatomy_matrix,
    circulant_matrix,
    constant_circulant,
    contiguous_partition,
    dp_matrix,
    perfect_secrecy_matrix,
    product_matrix,
    tridiagonal_matrix,
)
from .entropy import (
    PrivacyReport,
    beta,
    budget_bits,
    conservative_beta,
    dp_epsilon_bound,
    entropy_rate,
    joint_beta,
    shannon_entropy,
)
from .estimators import CategoricalRandomizer, NumericalBistochasticTransformer
from .majorization import apply_to_distribution, majorizes, reverse_map
from .matrix import (
    BistochasticMatrix,
    check_distribution,
    ergodicize,
    is_diagonally_dominant,
    is_strictly_positive,
    load_matrix,
    save_matrix,
    validate,
)
from .pram import (
    CategoricalColumn,
    Dataset,
    NumericalColumn,
    anonymize_conservative,
    estimate_frequencies,
    joint_randomize,
    randomize_categorical,
    transform_numeric_linear,
    transform_numeric_permute,
    transform_numeric_sample,
)

__all__ = [
    "__version__",
    "BirkhoffDecomposition",
    "decompose",
    "recompose",
    "sample_permutation",
    "AnatomyPartition",
    "anatomy_matrix",
    "circulant_matrix",
    "constant_circulant",
    "contiguous_partition",
    "dp_matrix",
    "perfect_secrecy_matrix",
    "product_matrix",
    "tridiagonal_matrix",
    "PrivacyReport",
    "beta",
    "budget_bits",
    "conservative_beta",
    "dp_epsilon_bound",
    "entropy_rate",
    "joint_beta",
    "shannon_entropy",
    "CategoricalRandomizer",
    "NumericalBistochasticTransformer",
    "apply_to_distribution",
    "majorizes",
    "reverse_map",
    "BistochasticMatrix",
    "check_distribution",
    "ergodicize",
    "is_diagonally_dominant",
    "is_strictly_positive",
    "load_matrix",
    "save_matrix",
    "validate",
    "CategoricalColumn",
    "Dataset",
    "NumericalColumn",
    "anonymize_conservative",
    "estimate_frequencies",
    "joint_randomize",
    "randomize_categorical",
    "transform_numeric_linear",
    "transform_numeric_permute",
    "transform_numeric_sample",
]
