"""Command-line interface.

Subcommands::

    bistochastic matrix KIND ...      build a matrix file and print its guarantees
    bistochastic analyze FILE...      per-matrix and aggregate beta
    bistochastic anonymize ...        protect a dataset column by column (or jointly)
    bistochastic estimate ...         recover original frequencies from counts
    bistochastic decompose FILE       Birkhoff-von Neumann decomposition
    bistochastic table1               reference table of 12 x 12 parameterizations

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numerical
failure. Errors are printed as a single ``error: <Kind>: <message>`` line
on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import __version__
from .birkhoff import decompose, recompose
from .constructors import (
    anatomy_matrix,
    constant_circulant,
    contiguous_partition,
    dp_matrix,
    perfect_secrecy_matrix,
    tridiagonal_matrix,
    AnatomyPartition,
)
from .dataset_io import load_dataset, load_schema, save_dataset
from .entropy import (
    beta,
    conservative_report,
    dp_epsilon_bound,
    entropy_rate,
)
from .exceptions import BistochasticError, IoFailure, NegativeEstimateWarning, SingularMatrix, ValidationError
from .matrix import ergodicize, load_matrix, read_matrix_text, save_matrix, FILE_TOLERANCE
from .pram import MODES, anonymize_conservative, estimate_frequencies, joint_randomize

KINDS = ("dp", "secrecy", "anatomy", "circulant", "tridiagonal")
BETA_TOLERANCE = 1e-4
U64_MAX = 2**64 - 1

# (family, parameter label, parameter values, reported beta %)
REFERENCE_TABLE = (
    ("Differential privacy", "eps", (5.0, 3.0, 1.0), (17, 60, 97)),
    ("K-anonymity", "k", (2, 3, 6), (28, 56, 72)),
    ("Tridiagonal matrix", "alpha", (0.1, 0.3, 0.4), (24, 35, 40)),
    ("Circulant matrix", "p11", (0.9, 0.6, 0.2), (21, 63, 93)),
)
REFERENCE_SIZE = 12
MISMATCH_POINTS = 1


class CliError(BistochasticError):
    def __init__(self, message, exit_code=1):
        super().__init__(message)
        self.exit_code = exit_code


def _pct(x: float, precision: int | None) -> str:
    return f"{100 * x:.{precision or 0}f}%"


def build(kind: str, r: int | None = None, epsilon=None, k=None, partition=None, p11=None, alpha=None):
    """Build one of the named matrix families from CLI-style parameters."""
    def need(name, value):
        if value is None:
            raise CliError(f"kind {kind!r} needs --{name}")
        return value

    if kind == "dp":
        return dp_matrix(need("r", r), need("epsilon", epsilon))
    if kind == "secrecy":
        return perfect_secrecy_matrix(need("r", r))
    if kind == "anatomy":
        if partition is not None:
            return anatomy_matrix(partition)
        return anatomy_matrix(contiguous_partition(need("r", r), need("k", k)))
    if kind == "circulant":
        return constant_circulant(need("r", r), need("p11", p11))
    if kind == "tridiagonal":
        return tridiagonal_matrix([need("alpha", alpha)] * (need("r", r) - 1))
    raise CliError(f"unknown kind {kind!r}")


def parameter_for_beta(kind: str, r: int, target: float) -> float:
    """Scalar parameter of a one-parameter family whose beta equals ``target``.

    Families: ``dp`` (epsilon), ``circulant`` (diagonal value p11) and
    ``tridiagonal`` (a constant alpha). Found by bracketing root search to
    within ``BETA_TOLERANCE`` in beta.
    """
    if not 0 < target <= 1:
        raise CliError(f"--target-beta must lie in (0, 1], got {target!r}")

    if kind == "dp":
        f = lambda e: beta(dp_matrix(r, e)) - target  # noqa: E731
        if f(0.0) <= 0:
            return 0.0
        hi = 1.0
        while f(hi) > 0:
            hi *= 2
        x = brentq(f, 0.0, hi, xtol=1e-12)
    elif kind == "circulant":
        f = lambda p: beta(constant_circulant(r, p)) - target  # noqa: E731
        if f(1.0 / r) <= 0:
            return 1.0 / r
        x = brentq(f, 1.0 / r, 1.0, xtol=1e-12)
    elif kind == "tridiagonal":
        g = lambda a: beta(tridiagonal_matrix([a] * (r - 1)))  # noqa: E731
        best = minimize_scalar(lambda a: -g(a), bounds=(0.0, 0.5), method="bounded", options={"xatol": 1e-10})
        top = best.x
        if g(top) < target - BETA_TOLERANCE:
            raise CliError(f"tridiagonal matrices of size {r} reach at most beta = {g(top):.4f}")
        if g(top) <= target:
            return float(top)
        x = brentq(lambda a: g(a) - target, 0.0, top, xtol=1e-12)
    else:
        raise CliError(f"--target-beta is not supported for kind {kind!r}")
    return float(x)


def _read_partition(path) -> AnatomyPartition:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.split() for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    try:
        return AnatomyPartition([[int(t) for t in ln] for ln in lines])
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _print_summary(m, precision, out=None):
    out = out or sys.stdout
    h = entropy_rate(m)
    budget = math.log2(m.size)
    print(f"size: {m.size}", file=out)
    print(f"entropy_rate_bits: {h:.6f}", file=out)
    print(f"budget_bits: {budget:.6f}", file=out)
    if m.size >= 2:
        print(f"beta: {_pct(beta(m), precision)}", file=out)
    print(f"dp_epsilon_bound: {dp_epsilon_bound(m):.6g}", file=out)


def cmd_matrix(args) -> int:
    partition = _read_partition(args.partition) if args.partition else None
    params = dict(r=args.r, epsilon=args.epsilon, k=args.k, partition=partition, p11=args.p11, alpha=args.alpha)
    if args.target_beta is not None:
        if args.r is None:
            raise CliError("--target-beta needs --r")
        x = parameter_for_beta(args.kind, args.r, args.target_beta)
        key = {"dp": "epsilon", "circulant": "p11", "tridiagonal": "alpha"}[args.kind]
        params[key] = x
        print(f"{key}: {x!r}")
    m = build(args.kind, **params)
    if args.gamma is not None:
        m = ergodicize(m, args.gamma)
    save_matrix(m, args.out)
    print(f"wrote: {args.out}")
    _print_summary(m, args.precision)
    return 0


def _load_for_cli(path, tolerance, gamma):
    raw = read_matrix_text(path)
    slack = raw.shape[0] * gamma if gamma else 0.0
    try:
        return load_matrix(path, tolerance=tolerance, super_slack=slack)
    except ValidationError as exc:
        exc.args = (f"{path}: {exc}",)
        raise


def cmd_analyze(args) -> int:
    matrices = [_load_for_cli(p, args.tolerance, args.gamma) for p in args.matrices]
    report = conservative_report(matrices, [os.path.basename(p) for p in args.matrices])
    sys.stdout.write(report.to_keyvalue() if args.keyvalue else report.to_text(args.precision))
    return 0


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(cfg, dict) or not ("columns" in cfg or "joint" in cfg):
        raise ValidationError(f"{path}: config needs a 'columns' or 'joint' section")
    return cfg


def cmd_anonymize(args) -> int:
    if not 0 <= args.seed <= U64_MAX:
        raise CliError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
    cfg = _load_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    resolve = lambda p: p if os.path.isabs(p) else os.path.join(base, p)  # noqa: E731
    ds = load_dataset(args.data, load_schema(args.schema))

    if "joint" in cfg:
        m = _load_for_cli(resolve(cfg["joint"]["matrix"]), args.tolerance, None)
        out, report = joint_randomize(ds, m, rng=np.random.default_rng(args.seed))
    else:
        columns = cfg["columns"]
        missing = [n for n in ds.names if n not in columns]
        if missing:
            raise ValidationError(f"{args.config}: no matrix configured for columns {missing}")
        matrices, modes = [], []
        for col in ds.columns:
            entry = columns[col.name]
            if isinstance(entry, str):
                entry = {"matrix": entry}
            matrices.append(_load_for_cli(resolve(entry["matrix"]), args.tolerance, None))
            default = "sample" if col.kind == "categorical" else args.mode
            modes.append(entry.get("mode", default))
        out, report = anonymize_conservative(ds, matrices, modes, seed=args.seed, n_jobs=args.jobs)

    save_dataset(out, args.out)
    report_path = args.report or f"{args.out}.report.txt"
    try:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_text(args.precision))
            fh.write("\n")
            fh.write(report.to_keyvalue())
    except OSError as exc:
        raise IoFailure(f"{report_path}: {exc}") from exc
    sys.stdout.write(report.to_text(args.precision))
    print(f"wrote: {args.out}")
    print(f"report: {report_path}")
    return 0


def _read_counts(path) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            tokens = fh.read().replace(",", " ").split()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    try:
        counts = np.array([float(t) for t in tokens])
    except ValueError:
        raise ValidationError(f"{path}: counts must be numbers") from None
    if counts.size == 0 or np.any(counts < 0) or counts.sum() <= 0:
        raise ValidationError(f"{path}: need nonnegative counts with a positive total")
    return counts


def cmd_estimate(args) -> int:
    import warnings

    counts = _read_counts(args.counts)
    m = read_matrix_text(args.matrix)
    lam = counts / counts.sum()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NegativeEstimateWarning)
            pi = estimate_frequencies(lam, m)
    except SingularMatrix:
        raise SingularMatrix(
            "estimator unavailable: matrix singular (the randomized data carry no "
            "recoverable information about the original distribution)"
        ) from None
    p = args.precision if args.precision is not None else 6
    print("observed: " + " ".join(f"{x:.{p}f}" for x in lam))
    print("estimate: " + " ".join(f"{x:.{p}f}" for x in pi))
    neg = np.flatnonzero(pi < 0)
    if neg.size:
        print("warning: negative estimate components at levels " + " ".join(map(str, neg)))
    return 0


def cmd_decompose(args) -> int:
    m = _load_for_cli(args.matrix, args.tolerance, None)
    d = decompose(m, args.zero_threshold)
    order = sorted(range(len(d)), key=lambda j: -d.weights[j])
    for j in order:
        print(f"{d.weights[j]!r}; {' '.join(map(str, d.permutations[j]))}")
    err = float(np.abs(recompose(d) - m.entries).max())
    print(f"terms: {len(d)}")
    print(f"recomposition_max_error: {err:.3e}")
    return 0


def table1_rows(gamma: float | None = None):
    """Computed beta for every reference parameterization at r = 12.

    Yields ``(family, label, value, computed_beta, reported_percent, mismatch)``.
    A cell is a mismatch when the rounded computed percentage differs from
    the reported one by more than one point.
    """
    r = REFERENCE_SIZE
    for family, label, values, reported in REFERENCE_TABLE:
        for value, rep in zip(values, reported):
            if family.startswith("Differential"):
                m = dp_matrix(r, value)
            elif family.startswith("K-anon"):
                m = anatomy_matrix(contiguous_partition(r, value))
            elif family.startswith("Tridiagonal"):
                m = tridiagonal_matrix([value] * (r - 1))
            else:
                m = constant_circulant(r, value)
            if gamma:
                m = ergodicize(m, gamma)
            b = beta(m)
            mismatch = abs(round(100 * b) - rep) > MISMATCH_POINTS
            yield family, label, value, b, rep, mismatch


def cmd_table1(args) -> int:
    print(f"beta at r = {REFERENCE_SIZE} as a share of log2 {REFERENCE_SIZE} = {math.log2(REFERENCE_SIZE):.4f} bits")
    print(f"{'family':<22}{'parameter':<13}{'computed':>9}{'reported':>10}  status")
    for family, label, value, b, rep, mismatch in table1_rows(args.gamma):
        status = "MISMATCH" if mismatch else "ok"
        print(f"{family:<22}{f'{label}={value:g}':<13}{_pct(b, args.precision):>9}{f'{rep}%':>10}  {status}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bistochastic", description="Bistochastic privacy toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def precision(sp):
        sp.add_argument("--precision", type=int, default=None,
                        help="digits after the decimal point for percentages (default: round to integers)")

    sp = sub.add_parser("matrix", help="build a matrix file")
    sp.add_argument("kind", choices=KINDS)
    sp.add_argument("--r", type=int, help="number of categories or individuals")
    sp.add_argument("--epsilon", type=float, help="privacy budget for kind=dp")
    sp.add_argument("--k", type=int, help="class size for kind=anatomy; the last class absorbs any remainder")
    sp.add_argument("--partition", help="kind=anatomy: file with one class per line, indices separated by spaces")
    sp.add_argument("--p11", type=float, help="diagonal value for kind=circulant")
    sp.add_argument("--alpha", type=float, help="off-diagonal value for kind=tridiagonal")
    sp.add_argument("--gamma", type=float, help="replace zeros by gamma (super doubly stochastic output)")
    sp.add_argument("--target-beta", type=float, help="solve for the family parameter giving this beta")
    sp.add_argument("--out", required=True)
    precision(sp)
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("analyze", help="report entropy and beta for matrix files")
    sp.add_argument("matrices", nargs="+")
    sp.add_argument("--tolerance", type=float, default=FILE_TOLERANCE)
    sp.add_argument("--gamma", type=float, help="accept super doubly stochastic files built with this gamma")
    sp.add_argument("--keyvalue", action="store_true", help="machine-readable key=value output")
    precision(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("anonymize", help="anonymize a dataset")
    sp.add_argument("--data", required=True)
    sp.add_argument("--schema", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--report")
    sp.add_argument("--mode", choices=MODES, default="linear", help="default mode for numerical columns")
    sp.add_argument("--jobs", type=int, default=1, help="columns processed in parallel")
    sp.add_argument("--tolerance", type=float, default=FILE_TOLERANCE)
    precision(sp)
    sp.set_defaults(func=cmd_anonymize)

    sp = sub.add_parser("estimate", help="estimate original frequencies")
    sp.add_argument("--counts", required=True, help="observed count per level, whitespace or comma separated")
    sp.add_argument("--matrix", required=True)
    precision(sp)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("decompose", help="Birkhoff-von Neumann decomposition")
    sp.add_argument("matrix")
    sp.add_argument("--zero-threshold", type=float, default=1e-12)
    sp.add_argument("--tolerance", type=float, default=FILE_TOLERANCE)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("table1", help="beta of the reference 12 x 12 parameterizations")
    sp.add_argument("--gamma", type=float, help="ergodicize matrices with zeros before measuring")
    precision(sp)
    sp.set_defaults(func=cmd_table1)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except BistochasticError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: IoFailure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
