"""Command-line interface.

Subcommands: spectral, check, scan, search, kernel, demo.  Output is JSON
(CSV for scans) on stdout with stable 17-significant-digit floats, so a
repeated invocation is byte-identical.  Exit codes: 0 success and all
checks hold, 1 a chain violated or a search found a violation, 2 usage or
validation error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .chains import (
    ChainId,
    ContractError,
    evaluate_chain,
    scan_monotone,
)
from .explorer import (
    Finding,
    JORDAN_NAIVE_WITNESS,
    SearchConfig,
    save_findings,
    search_inequivalence,
    search_violation,
)
from .kernelgrid import (
    FormulaDomainError,
    FormulaSyntaxError,
    KernelSpec,
    TruncatedMatrixSpec,
    kernel_geomean_check,
    parse_entry_expr,
    truncation_sequence,
)
from .nnmatrix import DomainError, NonNegativeMatrix, ShapeError
from .serialize import dumps
from .spectral import (
    SpectralConstraintError,
    max_times_radius,
    numerical_radius,
    operator_norm,
    spectral_radius,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NOCONVERGE = 3


class UsageError(ValueError):
    pass


def _load_matrix(path: str) -> NonNegativeMatrix:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"matrix file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    try:
        return NonNegativeMatrix.from_json_dict(obj)
    except (DomainError, ShapeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_grid_spec(spec: str, m: int) -> list[float]:
    """Linear t grid "start:stop:count"; the default 1:m:21 collapses to the
    single point t=1 when m == 1."""
    if spec == "default":
        if m <= 1:
            return [1.0]
        count = 21
        return [1.0 + i * (m - 1.0) / (count - 1) for i in range(count)]
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid spec must be start:stop:count, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid spec must be start:stop:count, got {spec!r}") from None
    if count < 1:
        raise UsageError("grid count must be >= 1")
    if count == 1:
        return [start]
    if stop <= start:
        raise UsageError("grid stop must exceed start")
    return [start + i * (stop - start) / (count - 1) for i in range(count)]


def _parse_n_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            n = int(parts[0])
            return n, n
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise UsageError(f"--n must be N or LO:HI, got {text!r}")


def _parse_p(text: str):
    if text in ("1", "2"):
        return int(text)
    if text == "inf":
        return math.inf
    raise UsageError(f"--p must be 1, 2 or inf, got {text!r}")


# -- subcommands ---------------------------------------------------------------

_FUNCTIONALS = ("rho", "norm1", "norm2", "norminf", "numrad", "maxtimes")


def _cmd_spectral(args) -> int:
    if len(args.inputs) != 1:
        raise UsageError("spectral takes exactly one --in matrix")
    mat = _load_matrix(args.inputs[0])
    if args.fn == "rho":
        est = spectral_radius(mat)
    elif args.fn == "norm1":
        est = operator_norm(mat, 1)
    elif args.fn == "norm2":
        est = operator_norm(mat, 2)
    elif args.fn == "norminf":
        est = operator_norm(mat, math.inf)
    elif args.fn == "numrad":
        est = numerical_radius(mat)
    else:
        est = max_times_radius(mat)
    _emit(dumps(est.to_json_dict()) + "\n", args.out)
    return EXIT_OK if est.converged else EXIT_NOCONVERGE


def _cmd_check(args) -> int:
    mats = [_load_matrix(p) for p in args.inputs]
    params: dict = {}
    if args.t is not None:
        params["t"] = args.t
    if args.lam is not None:
        params["lambda"] = args.lam
    if args.alpha:
        if args.chain == ChainId.POWER_SERIES.value:
            params["coeffs"] = list(args.alpha)
        else:
            params["alphas"] = list(args.alpha)
    if args.p is not None:
        params["p"] = _parse_p(args.p)
    if args.fn is not None and args.chain == ChainId.TWO_MATRIX_T.value:
        params["variant"] = args.fn
    report = evaluate_chain(args.chain, mats, params)
    _emit(dumps(report.to_json_dict()) + "\n", args.out)
    if report.inconclusive:
        return EXIT_NOCONVERGE
    return EXIT_OK if report.holds else EXIT_VIOLATION


def _cmd_scan(args) -> int:
    mats = [_load_matrix(p) for p in args.inputs]
    grid = _parse_grid_spec(args.grid, len(mats))
    report = scan_monotone(mats, grid)
    if args.format == "json":
        _emit(dumps(report.to_json_dict()) + "\n", args.out)
    else:
        lines = ["t,r,N"]
        for t, r, nv in zip(report.t_grid, report.r_values, report.n_values):
            lines.append(f"{t:.17g},{r:.17g},{nv:.17g}")
        _emit("\n".join(lines) + "\n", args.out)
    if not report.converged:
        return EXIT_NOCONVERGE
    ok = report.monotone_r and report.monotone_n and report.bounded_r and report.bounded_n
    return EXIT_OK if ok else EXIT_VIOLATION


def _cmd_search(args) -> int:
    cfg = SearchConfig(
        seed=args.seed,
        n_range=_parse_n_range(args.n),
        density=args.density,
        trials=args.trials,
        target_gap=args.target_gap,
    )
    if args.target == "inequivalence":
        outcome = search_inequivalence(cfg)
    else:
        outcome = search_violation(args.target, cfg)
    if args.findings:
        save_findings(args.findings, [outcome])
    _emit(dumps(outcome.to_json_dict()) + "\n", args.out)
    return EXIT_VIOLATION if isinstance(outcome, Finding) else EXIT_OK


def _cmd_kernel(args) -> int:
    if not args.formula:
        raise UsageError("kernel requires at least one --formula")
    if args.size:
        if len(args.formula) != 1:
            raise UsageError("truncation mode takes exactly one --formula")
        try:
            sizes = [int(s) for s in args.size.split(",")]
        except ValueError:
            raise UsageError(f"--size must be a comma list of integers, got {args.size!r}") from None
        spec = TruncatedMatrixSpec(parse_entry_expr(args.formula[0]), sizes)
        seq = truncation_sequence(spec)
        obj = {
            "formula": args.formula[0],
            "sections": [{"size": size, "estimate": est.to_json_dict()} for size, est in seq],
        }
        _emit(dumps(obj) + "\n", args.out)
        return EXIT_OK if all(est.converged for _, est in seq) else EXIT_NOCONVERGE
    kernels = [KernelSpec(parse_entry_expr(f)) for f in args.formula]
    report = kernel_geomean_check(kernels, args.n)
    _emit(dumps(report.to_json_dict()) + "\n", args.out)
    if report.inconclusive:
        return EXIT_NOCONVERGE
    return EXIT_OK if report.holds else EXIT_VIOLATION


def _cmd_demo(args) -> int:
    """Reproduce the three built-in reference fixtures with their known values."""
    fixtures = []

    ones = NonNegativeMatrix([[1.0, 1.0], [1.0, 1.0]])
    rho = spectral_radius(ones)
    fixtures.append({
        "name": "all_ones_2x2_spectral_radius",
        "computed": rho.value,
        "expected": 2.0,
        "match": abs(rho.value - 2.0) <= 1e-9,
    })

    shift = NonNegativeMatrix([[0.0, 1.0], [0.0, 0.0]])
    w = numerical_radius(shift)
    fixtures.append({
        "name": "upper_shift_2x2_numerical_radius",
        "computed": w.value,
        "expected": 0.5,
        "match": abs(w.value - 0.5) <= 1e-9,
    })

    a, b = JORDAN_NAIVE_WITNESS
    from .nnmatrix import hadamard_product_chain, matmul_chain
    had = operator_norm(hadamard_product_chain([a, b, a]), 2)
    ord_ = operator_norm(matmul_chain([a, b, a]), 2)
    fixtures.append({
        "name": "triple_product_norm_pair",
        "computed": [had.value, ord_.value],
        "expected": [1.0, 0.0],
        "match": had.value == 1.0 and ord_.value == 0.0,
    })

    obj = {"fixtures": fixtures, "all_match": all(f["match"] for f in fixtures)}
    _emit(dumps(obj) + "\n", args.out)
    return EXIT_OK if obj["all_match"] else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadspec",
        description="Spectral-radius / operator-norm / numerical-radius inequality checks "
                    "for Hadamard products of non-negative matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectral", help="compute one scalar functional of a matrix")
    sp.add_argument("--fn", required=True, choices=_FUNCTIONALS)
    sp.add_argument("--in", dest="inputs", action="append", required=True, metavar="FILE")
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_spectral)

    ck = sub.add_parser("check", help="evaluate one inequality chain on matrix files")
    ck.add_argument("--chain", required=True, metavar="ID")
    ck.add_argument("--in", dest="inputs", action="append", required=True, metavar="FILE",
                    help="matrix files, ordered (repeatable)")
    ck.add_argument("--t", type=float)
    ck.add_argument("--lambda", dest="lam", type=float)
    ck.add_argument("--alpha", type=float, action="append",
                    help="weights; doubles as the coefficient list for power_series")
    ck.add_argument("--p", help="norm index: 1, 2 or inf")
    ck.add_argument("--fn", choices=("rho", "norm", "numrad"),
                    help="variant selector for two_matrix_t")
    ck.add_argument("--out")
    ck.set_defaults(func=_cmd_check)

    sc = sub.add_parser("scan", help="scan r(t) and N(t) over a t grid")
    sc.add_argument("--in", dest="inputs", action="append", required=True, metavar="FILE")
    sc.add_argument("--grid", default="default", help="start:stop:count (default 1:m:21)")
    sc.add_argument("--format", choices=("json", "csv"), default="csv")
    sc.add_argument("--out")
    sc.set_defaults(func=_cmd_scan)

    se = sub.add_parser("search", help="randomized counterexample search")
    se.add_argument("--target", required=True,
                    choices=("inequivalence", "sfirst_middle", "jordan_naive"))
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--trials", type=int, default=1000)
    se.add_argument("--density", type=float, default=1.0)
    se.add_argument("--n", default="2:4", help="matrix size N or range LO:HI")
    se.add_argument("--target-gap", dest="target_gap", type=float, default=1e-6)
    se.add_argument("--findings", help="append the outcome to this JSON-lines corpus")
    se.add_argument("--out")
    se.set_defaults(func=_cmd_search)

    ke = sub.add_parser("kernel", help="kernel geometric-mean check or truncation sequence")
    ke.add_argument("--formula", action="append", metavar="EXPR",
                    help="kernel k(x,y) or entry a(i,j) formula (repeatable)")
    ke.add_argument("--n", type=int, default=64, help="grid size for kernel discretization")
    ke.add_argument("--size", help="comma list of section sizes (switches to truncation mode)")
    ke.add_argument("--out")
    ke.set_defaults(func=_cmd_kernel)

    de = sub.add_parser("demo", help="reproduce the built-in reference fixtures")
    de.add_argument("--out")
    de.set_defaults(func=_cmd_demo)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (UsageError, ContractError, DomainError, ShapeError, SpectralConstraintError,
            FormulaSyntaxError, FormulaDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
