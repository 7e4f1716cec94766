"""Exception hierarchy.

Every error raised by the package derives from :class:`BistochasticError`.
The three intermediate classes map onto CLI exit codes: validation
problems exit with 1, I/O problems with 2, numerical failures with 3.
"""


class BistochasticError(Exception):
    exit_code = 1


class ValidationError(BistochasticError, ValueError):
    exit_code = 1


class DataIOError(BistochasticError, OSError):
    exit_code = 2


class NumericalError(BistochasticError, ArithmeticError):
    exit_code = 3


# matrix validation


class NotSquare(ValidationError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"matrix is not square: shape {self.shape}")


class NonFiniteEntry(ValidationError):
    def __init__(self, row, col):
        self.row, self.col = row, col
        super().__init__(f"non-finite entry at ({row}, {col})")


class NegativeEntry(ValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"negative entry {value!r} at ({row}, {col})")


class RowSumViolation(ValidationError):
    def __init__(self, row, total):
        self.row, self.total = row, total
        super().__init__(f"row {row} sums to {total!r}")


class ColumnSumViolation(ValidationError):
    def __init__(self, col, total):
        self.col, self.total = col, total
        super().__init__(f"column {col} sums to {total!r}")


class NotADistribution(ValidationError):
    pass


class GammaOutOfRange(ValidationError):
    pass


class NotStrictlyBistochastic(ValidationError):
    """Operation needs super_slack == 0 but got an ergodicized matrix."""


# constructors


class InvalidSize(ValidationError):
    pass


class InvalidEpsilon(ValidationError):
    pass


class InvalidPartition(ValidationError):
    pass


class AlphaConstraintViolated(ValidationError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"tridiagonal parameter constraint violated at index {index}")


class InvalidProbability(ValidationError):
    pass


# entropy / privacy


class DegenerateSize(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


# birkhoff


class ThresholdOutOfRange(ValidationError):
    pass


class NoPerfectMatching(NumericalError):
    pass


# pram


class SingularMatrix(NumericalError):
    pass


class JointTooLarge(ValidationError):
    pass


class NonCategoricalColumn(ValidationError):
    pass


class ColumnErrors(ValidationError):
    """Several per-column failures collected into one error."""

    def __init__(self, errors):
        self.errors = dict(errors)
        detail = "; ".join(f"{name}: {err}" for name, err in self.errors.items())
        super().__init__(detail)
        codes = {getattr(e, "exit_code", 1) for e in self.errors.values()}
        self.exit_code = max(codes) if codes else 1


# dataset io


class MissingColumn(ValidationError):
    pass


class UnparseableCell(ValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"cannot parse {value!r} at row {row}, column {col!r}")


class UnknownLevel(ValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"value {value!r} at row {row} is not a declared level of column {col!r}")


class IoFailure(DataIOError):
    pass


class NegativeEstimateWarning(UserWarning):
    """Raw frequency estimate has negative components (sampling noise)."""
