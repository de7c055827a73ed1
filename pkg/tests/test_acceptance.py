"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Tolerances are pinned here and nowhere else.
"""

import contextlib
import io
import math
import time
from pathlib import Path

import numpy as np
import pytest

from hadspec.chains import catalog_ids, evaluate_chain, scan_monotone, scan_numrad
from hadspec.cli import run as cli_run
from hadspec.explorer import (
    Exhausted,
    Finding,
    JORDAN_NAIVE_WITNESS,
    SearchConfig,
    SplitMix64,
    sample_instance,
    save_findings,
    search_inequivalence,
    search_violation,
)
from hadspec.kernelgrid import KernelSpec, TruncatedMatrixSpec, kernel_geomean_check, truncation_sequence
from hadspec.nnmatrix import (
    NonNegativeMatrix,
    block_cyclic,
    hadamard_power,
    hadamard_product_chain,
    matmul_chain,
)
from hadspec.spectral import (
    charpoly_radius,
    matrix_exp,
    max_times_radius,
    numerical_radius,
    operator_norm,
    resolvent,
    spectral_radius,
)

GOLDEN = Path(__file__).parent / "golden"


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:>2}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_01_reference_fixtures():
    start = time.monotonic()
    ones = NonNegativeMatrix([[1, 1], [1, 1]])
    rho_ok = abs(spectral_radius(ones).value - 2.0) <= 1e-9

    scan = scan_monotone([ones], [1.0, 2.0, 4.0])
    r_ok = all(abs(r - 2.0 ** (1.0 / t)) <= 1e-9 for t, r in zip(scan.t_grid, scan.r_values))

    shift = NonNegativeMatrix([[0, 1], [0, 0]])
    w_ok = abs(numerical_radius(shift).value - 0.5) <= 1e-10

    a, b = JORDAN_NAIVE_WITNESS
    had = operator_norm(hadamard_product_chain([a, b, a]), 2).value
    ordinary = operator_norm(matmul_chain([a, b, a]), 2).value
    pair_ok = had == 1.0 and ordinary == 0.0

    elapsed = time.monotonic() - start
    ok = rho_ok and r_ok and w_ok and pair_ok and elapsed < 1.0
    _report(1, ok, f"fixtures rho=2, r(t)=2^(1/t), w=1/2, norms (1, 0); {elapsed:.3f}s")


def test_criterion_02_master_chain_property_suite():
    start = time.monotonic()
    violations = []
    inconclusive = 0
    per_chain = 200
    for chain in catalog_ids():
        stream = SplitMix64(0xA11CE)
        for trial in range(per_chain):
            density = 0.3 if trial % 2 == 0 else 1.0
            mats, params = sample_instance(chain, stream, (1, 6), density, max_m=5)
            rep = evaluate_chain(chain, mats, params, tol=1e-9)
            if rep.inconclusive:
                inconclusive += 1
            elif not rep.holds:
                violations.append((chain, trial, rep.min_slack))
    elapsed = time.monotonic() - start
    ok = not violations and elapsed < 120.0
    _report(2, ok, f"{len(catalog_ids())} chains x {per_chain} instances, "
                   f"violations={len(violations)}, inconclusive={inconclusive}, {elapsed:.1f}s"
                   + (f"; first={violations[:3]}" if violations else ""))


def test_criterion_03_oracle_agreement():
    start = time.monotonic()
    rng = SplitMix64(0x0AC1E)
    worst_rho = worst_norm = 0.0
    for _ in range(500):
        n = rng.randint(1, 4)
        entries = [[rng.uniform() for _ in range(n)] for _ in range(n)]
        m = NonNegativeMatrix(entries)
        g = spectral_radius(m)
        cp = charpoly_radius(m)
        worst_rho = max(worst_rho, abs(g.value - cp) / max(1.0, cp))
        power = operator_norm(m, 2)
        gelfand = math.sqrt(spectral_radius(matmul_chain([m.T, m])).value)
        worst_norm = max(worst_norm, abs(power.value - gelfand) / max(1.0, gelfand))
    elapsed = time.monotonic() - start
    ok = worst_rho <= 1e-8 and worst_norm <= 1e-8 and elapsed < 30.0
    _report(3, ok, f"500 matrices, worst rho err {worst_rho:.2e}, "
                   f"worst norm err {worst_norm:.2e}, {elapsed:.1f}s")


def test_criterion_04_block_cyclic_identity():
    rng = SplitMix64(0xB10C)
    worst = 0.0
    for trial in range(100):
        m = (2, 3, 4)[trial % 3]
        n = rng.randint(1, 4)
        mats = [NonNegativeMatrix([[rng.uniform() for _ in range(n)] for _ in range(n)])
                for _ in range(m)]
        rho_t = spectral_radius(block_cyclic(mats)).value
        rho_prod = spectral_radius(matmul_chain(mats)).value
        worst = max(worst, abs(rho_t ** m - rho_prod) / max(1.0, rho_prod))
    ok = worst <= 1e-7
    _report(4, ok, f"100 instances m in {{2,3,4}}, worst rel err {worst:.2e}")


def test_criterion_05_max_algebra_limit():
    fix_ok = (abs(max_times_radius(NonNegativeMatrix([[1, 2], [3, 4]])).value - 4.0) <= 1e-12
              and max_times_radius(NonNegativeMatrix([[0, 1], [0, 0]])).value == 0.0)
    rng = SplitMix64(0x3A97)
    bound_ok = True
    limit_ok = True
    for _ in range(100):
        n = rng.randint(2, 6)
        m = NonNegativeMatrix([[0.1 + 0.9 * rng.uniform() for _ in range(n)] for _ in range(n)])
        mu = max_times_radius(m).value
        values = [spectral_radius(hadamard_power(m, t)).value ** (1.0 / t)
                  for t in (1, 2, 4, 8, 16, 32)]
        bound_ok = bound_ok and all(mu <= v + 1e-9 * max(1.0, v) for v in values)
        limit_ok = limit_ok and abs(values[-1] - mu) <= 0.05 * max(1.0, mu)
    ok = fix_ok and bound_ok and limit_ok
    _report(5, ok, f"fixtures mu=4 and mu=0; bounds {bound_ok}, limit within 5% {limit_ok}")


def test_criterion_06_counterexample_searches(tmp_path):
    ineq = search_inequivalence(SearchConfig(seed=1, n_range=(3, 3), trials=10_000,
                                             target_gap=1e-6))
    ineq_ok = isinstance(ineq, Finding) and ineq.gap > 1e-6
    if ineq_ok:
        a, b = ineq.matrices
        ab, ba = matmul_chain([a, b]), matmul_chain([b, a])
        x = charpoly_radius(hadamard_product_chain([ab, ba]))
        y = charpoly_radius(hadamard_product_chain([ab, ab]))
        ineq_ok = abs(x - y) / max(1.0, y) > 1e-6

    jordan = search_violation("jordan_naive", SearchConfig(seed=1, n_range=(2, 2), trials=1000))
    jordan_ok = isinstance(jordan, Finding)

    a, b = JORDAN_NAIVE_WITNESS
    witness_ok = (operator_norm(hadamard_product_chain([a, b, a]), 2).value
                  > operator_norm(matmul_chain([a, b, a]), 2).value)

    sfirst = search_violation("sfirst_middle", SearchConfig(seed=1, n_range=(2, 4), trials=5000))
    corpus = tmp_path / "findings.jsonl"
    save_findings(corpus, [sfirst])
    persisted_ok = corpus.read_text().strip() != "" and isinstance(sfirst, (Finding, Exhausted))

    ok = ineq_ok and jordan_ok and witness_ok and persisted_ok
    sfirst_kind = "finding" if isinstance(sfirst, Finding) else "exhausted"
    _report(6, ok, f"inequivalence gap {getattr(ineq, 'gap', 0):.3g} (oracle-verified), "
                   f"jordan_naive at trial {jordan.seed_trail['trial'] if jordan_ok else '-'}, "
                   f"witness holds, sfirst_middle -> {sfirst_kind} (persisted)")


def test_criterion_07_kernel_and_truncation():
    rng = SplitMix64(0x7E57)
    kernel_ok = True
    for _ in range(20):
        m = rng.randint(1, 3)
        kernels = []
        for _ in range(m):
            c0 = round(rng.uniform(), 3)
            c1 = round(rng.uniform(), 3)
            c2 = round(rng.uniform(), 3)
            kernels.append(KernelSpec.parse(f"{c0} + {c1}*x*y + {c2}*x^2*y^2"))
        rep = kernel_geomean_check(kernels, 64)
        kernel_ok = kernel_ok and rep.holds

    spec = TruncatedMatrixSpec.parse("2^(-(i+j))", [2, 4, 8, 16])
    seq = truncation_sequence(spec)
    trunc_ok = all(abs(est.value - (1.0 - 4.0 ** -size) / 3.0) <= 1e-9 for size, est in seq)
    values = [est.value for _, est in seq]
    monotone_ok = all(a <= b + 1e-10 for a, b in zip(values, values[1:]))

    ok = kernel_ok and trunc_ok and monotone_ok
    _report(7, ok, "20 kernel geomean checks hold; truncation matches (1-4^-n)/3 and is monotone")


def test_criterion_08_monotone_scans():
    rng = SplitMix64(0x5CA9)
    scans_ok = True
    for _ in range(100):
        n = rng.randint(1, 5)
        m = rng.randint(1, 5)
        mats = [NonNegativeMatrix([[rng.uniform() for _ in range(n)] for _ in range(n)])
                for _ in range(m)]
        if m == 1:
            grid = [1.0]
        else:
            grid = [1.0 + i * (m - 1.0) / 20.0 for i in range(21)]
        rep = scan_monotone(mats, grid, tol=1e-9)
        scans_ok = scans_ok and rep.monotone_r and rep.monotone_n
        scans_ok = scans_ok and rep.bounded_r and rep.bounded_n

    shift = NonNegativeMatrix([[0, 1], [0, 0]])
    control = scan_numrad([shift], [1.0, 2.0, 4.0])
    control_ok = control[0] < control[1] < control[2]

    ok = scans_ok and control_ok
    _report(8, ok, f"100 scans non-increasing and bounded on [1, m]; "
                   f"numerical-radius control strictly increasing {control_ok}")


def test_criterion_09_spectral_mapping():
    exp_fix = matrix_exp(NonNegativeMatrix([[0, 1], [0, 0]])) == NonNegativeMatrix([[1, 1], [0, 1]])
    res_fix = (resolvent(NonNegativeMatrix([[0, 1], [0, 0]]), 1.0)
               == NonNegativeMatrix([[1, 1], [0, 1]])
               and resolvent(NonNegativeMatrix([[1.0]]), 2.0) == NonNegativeMatrix([[1.0]]))

    rng = SplitMix64(0x9A99)
    chains_ok = True
    for _ in range(100):
        n = rng.randint(1, 5)
        m = rng.randint(1, 4)
        mats = [NonNegativeMatrix([[rng.uniform() for _ in range(n)] for _ in range(n)])
                for _ in range(m)]
        rho = spectral_radius(matmul_chain(mats)).value
        if rho >= 5.0:
            scale = (4.0 / rho) ** (1.0 / m)
            mats = [NonNegativeMatrix(scale * mat.to_array()) for mat in mats]
            rho = spectral_radius(matmul_chain(mats)).value
        exp_rep = evaluate_chain("spectral_map_exp", mats, tol=1e-8)
        res_rep = evaluate_chain("spectral_map_resolvent", mats, {"lambda": rho + 1.0}, tol=1e-8)
        chains_ok = chains_ok and exp_rep.holds and res_rep.holds

    ok = exp_fix and res_fix and chains_ok
    _report(9, ok, f"exp/resolvent fixtures exact; 100 random mapping chains hold {chains_ok}")


def test_criterion_10_cli_golden_files():
    import sys

    sys.path.insert(0, str(GOLDEN))
    from regenerate import GOLDENS

    mismatches = []
    for name, argv in sorted(GOLDENS.items()):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli_run(argv)
        if buf.getvalue() != (GOLDEN / name).read_text(encoding="utf-8") or code not in (0, 1):
            mismatches.append(name)
    ok = not mismatches
    _report(10, ok, f"{len(GOLDENS)} golden invocations byte-identical"
                    + (f"; mismatched: {mismatches}" if mismatches else ""))
