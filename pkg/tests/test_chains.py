import math
import zlib

import numpy as np
import pytest

from hadspec.chains import (
    ChainId,
    ContractError,
    DEFAULT_CHAIN_TOL,
    catalog_ids,
    evaluate_chain,
    scan_monotone,
    scan_numrad,
    verify_dp_grid,
)
from hadspec.explorer import SplitMix64, sample_instance
from hadspec.nnmatrix import NonNegativeMatrix, WeightVector
from hadspec.spectral import ToleranceConfig, charpoly_radius

A = NonNegativeMatrix([[1, 2], [3, 4]])
B = NonNegativeMatrix([[0, 1], [1, 0]])
ONES = NonNegativeMatrix([[1, 1], [1, 1]])
SHIFT = NonNegativeMatrix([[0, 1], [0, 0]])


class TestFixtures:
    def test_huang_terms(self):
        rep = evaluate_chain("huang", [A, B])
        assert rep.holds and not rep.inconclusive
        assert rep.terms[0].value == pytest.approx(math.sqrt(6.0), rel=1e-9)
        assert rep.terms[1].value == pytest.approx((5.0 + math.sqrt(17.0)) / 2.0, rel=1e-8)

    def test_audenaert_middle_term(self):
        rep = evaluate_chain("audenaert", [A, B])
        # (A o A)(B o B) = [[4, 1], [16, 9]], top root of x^2 - 13x + 20
        expected = math.sqrt((13.0 + math.sqrt(89.0)) / 2.0)
        assert rep.terms[1].value == pytest.approx(expected, rel=1e-8)
        assert rep.holds
        assert expected == pytest.approx(math.sqrt(charpoly_radius(
            NonNegativeMatrix([[4, 1], [16, 9]]))), rel=1e-12)

    def test_jordan_degenerate_equality(self):
        a = NonNegativeMatrix([[0, 1], [0, 1]])
        b = NonNegativeMatrix([[1, 1], [0, 0]])
        rep = evaluate_chain("jordan", [a, b])
        assert rep.holds
        assert rep.terms[0].value == 0.0 and rep.terms[-1].value == 0.0

    def test_geo_mean_single_operand(self):
        rep = evaluate_chain("geo_mean", [A])
        assert rep.holds
        assert rep.terms[0].value == pytest.approx(rep.terms[1].value, rel=1e-9)

    def test_labels_are_stable(self):
        rep = evaluate_chain("audenaert", [A, B])
        assert [t.label for t in rep.terms] == [
            "rho(A o B)",
            "rho^{1/2}((A o A)(B o B))",
            "rho(A B)",
        ]


class TestContracts:
    def test_unknown_chain(self):
        with pytest.raises(ContractError):
            evaluate_chain("not_a_chain", [A])

    def test_arity(self):
        with pytest.raises(ContractError):
            evaluate_chain("audenaert", [A])
        with pytest.raises(ContractError):
            evaluate_chain("abtc", [A, B])

    def test_shape_contracts(self):
        with pytest.raises(ContractError):
            evaluate_chain("huang", [A, NonNegativeMatrix([[1, 2, 3], [4, 5, 6], [7, 8, 9]])])
        with pytest.raises(ContractError):
            evaluate_chain("huang", [NonNegativeMatrix([[1, 2]])])

    def test_t_range(self):
        with pytest.raises(ContractError):
            evaluate_chain("genP1_rho", [A, B], {"t": 2.5})
        with pytest.raises(ContractError):
            evaluate_chain("hpow_rho", [A], {"t": 0.5})
        with pytest.raises(ContractError):
            evaluate_chain("two_matrix_t", [A, B], {"t": 1.5, "variant": "numrad"})

    def test_weight_contracts(self):
        with pytest.raises(ContractError):
            evaluate_chain("weighted_mean_rho", [A, B], {"alphas": [0.25, 0.25]})
        with pytest.raises(ContractError):
            evaluate_chain("numrad_weighted", [A, B], {"alphas": [0.9, 0.6]})
        with pytest.raises(ContractError):
            evaluate_chain("weighted_mean_rho", [A, B], {"alphas": [1.0]})

    def test_resolvent_lambda_contract(self):
        with pytest.raises(ContractError):
            evaluate_chain("spectral_map_resolvent", [A], {"lambda": 1.0})
        with pytest.raises(ContractError):
            evaluate_chain("spectral_map_resolvent", [A], {})

    def test_power_series_contract(self):
        with pytest.raises(ContractError):
            evaluate_chain("power_series", [A], {"coeffs": []})
        with pytest.raises(ContractError):
            evaluate_chain("power_series", [A], {"coeffs": [1.0, -0.5]})

    def test_unexpected_param(self):
        with pytest.raises(ContractError):
            evaluate_chain("huang", [A, B], {"t": 2.0})


class TestReportSemantics:
    def test_deterministic(self):
        r1 = evaluate_chain("gram", [A, B], {"t": 1.5})
        r2 = evaluate_chain("gram", [A, B], {"t": 1.5})
        assert [t.value for t in r1.terms] == [t.value for t in r2.terms]

    def test_min_slack_matches_terms(self):
        rep = evaluate_chain("huang", [A, B])
        slacks = [b.value - a.value for a, b in zip(rep.terms, rep.terms[1:])]
        assert rep.min_slack == min(slacks)

    def test_inconclusive_is_not_violation(self):
        # a one-iteration budget cannot converge the norm power iteration
        tiny = ToleranceConfig(rel_tol=1e-14, max_power_iters=1, max_squarings=1)
        rep = evaluate_chain("atb", [A, B], cfg=tiny)
        assert rep.inconclusive and not rep.holds and not rep.violated

    def test_scale_covariance_of_huang(self):
        # rho is positively homogeneous: scaling every one of the m operands by
        # c multiplies both the Hadamard and the ordinary product by c^m, so
        # both terms pick up the same factor
        rng = np.random.default_rng(30)
        mats = [NonNegativeMatrix(rng.random((3, 3))) for _ in range(2)]
        c = 3.7
        base = evaluate_chain("huang", mats)
        scaled = evaluate_chain("huang", [NonNegativeMatrix(c * m.to_array()) for m in mats])
        for s, b in zip(scaled.terms, base.terms):
            assert s.value == pytest.approx(c ** 2 * b.value, rel=1e-9)
        # and directly on a single matrix
        one = evaluate_chain("huang", [mats[0]])
        one_scaled = evaluate_chain("huang", [NonNegativeMatrix(c * mats[0].to_array())])
        assert one_scaled.terms[0].value == pytest.approx(c * one.terms[0].value, rel=1e-9)

    def test_json_contract(self):
        obj = evaluate_chain("huang", [A, B]).to_json_dict()
        assert set(obj) == {"chain", "params", "terms", "holds", "inconclusive", "min_slack", "tol"}
        assert set(obj["terms"][0]) == {"label", "value", "converged"}

    def test_chen_zhang_sandwich(self):
        rng = np.random.default_rng(32)
        for _ in range(15):
            n, m = int(rng.integers(1, 5)), int(rng.integers(2, 5))
            mats = [NonNegativeMatrix(rng.random((n, n))) for _ in range(m)]
            t = 1.0 + (m - 1) * float(rng.random())
            rep = evaluate_chain("chen_zhang", mats, {"t": t})
            assert rep.holds, rep
            lo, hi = rep.terms[0].value, rep.terms[-1].value
            for term in rep.terms[1:-1]:
                assert lo <= term.value + 1e-9 * max(1.0, term.value)
                assert term.value <= hi + 1e-9 * max(1.0, hi)


class TestCatalogProperty:
    """Every catalog chain holds on random instances (small version of the
    acceptance master suite)."""

    @pytest.mark.parametrize("chain", catalog_ids())
    def test_chain_holds_on_random_instances(self, chain):
        stream = SplitMix64(0xC0FFEE ^ zlib.crc32(chain.encode()))
        for trial in range(15):
            density = 1.0 if trial % 2 else 0.3
            mats, params = sample_instance(chain, stream, (1, 5), density)
            rep = evaluate_chain(chain, mats, params)
            if rep.inconclusive:
                continue
            assert rep.holds, (chain, trial, [t.value for t in rep.terms], rep.min_slack)


class TestRectangularOperands:
    # gram/alt_transpose/atb/abtc pair transposed and plain factors, so they
    # make sense for same-shape rectangular operands too

    def test_atb_rectangular(self):
        rng = np.random.default_rng(38)
        a = NonNegativeMatrix(rng.random((3, 2)))
        b = NonNegativeMatrix(rng.random((3, 2)))
        rep = evaluate_chain("atb", [a, b])
        assert rep.holds

    def test_gram_rectangular(self):
        rng = np.random.default_rng(39)
        mats = [NonNegativeMatrix(rng.random((2, 4))) for _ in range(3)]
        rep = evaluate_chain("gram", [mats[0], mats[1], mats[2]], {"t": 2.0})
        assert rep.holds

    def test_alt_transpose_rectangular_both_parities(self):
        rng = np.random.default_rng(41)
        for m in (2, 3):
            mats = [NonNegativeMatrix(rng.random((4, 2))) for _ in range(m)]
            rep = evaluate_chain("alt_transpose", mats)
            assert rep.holds, (m, [t.value for t in rep.terms])

    def test_square_only_chain_rejects_rectangular(self):
        a = NonNegativeMatrix([[1, 2, 3], [4, 5, 6]])
        with pytest.raises(ContractError):
            evaluate_chain("huang", [a, a])


class TestScans:
    def test_all_ones_r_is_two_to_one_over_t(self):
        rep = scan_monotone([ONES], [1.0, 2.0, 4.0])
        for t, r in zip(rep.t_grid, rep.r_values):
            assert r == pytest.approx(2.0 ** (1.0 / t), rel=1e-9)
        assert rep.monotone_r and rep.monotone_n
        assert rep.bounded_r and rep.bounded_n

    def test_bound_applies_only_up_to_m(self):
        # two copies of the all-ones matrix: r(t) = 2^{2/t} < 2 for t > 2, yet
        # the grid points beyond m must not break the bounded flag
        rep = scan_monotone([ONES, ONES], [1.0, 2.0, 4.0, 8.0])
        assert rep.lower_bound_rho == pytest.approx(2.0, rel=1e-9)
        assert rep.r_values[-1] < rep.lower_bound_rho
        assert rep.bounded_r

    def test_identity_scan_constant(self):
        rep = scan_monotone([NonNegativeMatrix.identity(3)], [1.0, 2.0, 3.0])
        assert all(r == pytest.approx(1.0, abs=1e-10) for r in rep.r_values)
        assert rep.monotone_r and rep.bounded_r

    def test_random_scans_monotone_and_bounded(self):
        rng = np.random.default_rng(34)
        for _ in range(10):
            n, m = int(rng.integers(1, 5)), int(rng.integers(1, 4))
            mats = [NonNegativeMatrix(rng.random((n, n))) for _ in range(m)]
            grid = [1.0 + 0.5 * i for i in range(7)]
            rep = scan_monotone(mats, grid)
            assert rep.monotone_r and rep.monotone_n, rep
            assert rep.bounded_r and rep.bounded_n, rep

    def test_grid_validation(self):
        with pytest.raises(ContractError):
            scan_monotone([ONES], [])
        with pytest.raises(ContractError):
            scan_monotone([ONES], [0.5, 1.0])
        with pytest.raises(ContractError):
            scan_monotone([ONES], [1.0, 1.0])

    def test_numrad_scan_can_increase(self):
        # negative control: the numerical-radius analogue is not monotone
        values = scan_numrad([SHIFT], [1.0, 2.0, 4.0])
        assert values[0] < values[1] < values[2]
        assert values[0] == pytest.approx(0.5, abs=1e-9)


class TestVerifyDpGrid:
    def test_all_ones_grid_equality(self):
        grid = [[ONES, ONES], [ONES, ONES]]
        out = verify_dp_grid(grid, WeightVector([0.5, 0.5]))
        assert set(out) == {"elementwise", "norm", "spectral"}
        for rep in out.values():
            assert rep.holds

    def test_single_row_reduces_to_weighted_mean(self):
        w = WeightVector([0.7, 0.6])
        out = verify_dp_grid([[A, B]], w)
        direct = evaluate_chain("weighted_mean_rho", [A, B], {"alphas": [0.7, 0.6]})
        assert out["spectral"].terms[0].value == pytest.approx(direct.terms[0].value, rel=1e-9)
        assert out["spectral"].terms[1].value == pytest.approx(direct.terms[1].value, rel=1e-9)

    def test_random_grid_holds(self):
        rng = np.random.default_rng(36)
        grid = [[NonNegativeMatrix(rng.random((3, 3))) for _ in range(2)] for _ in range(2)]
        out = verify_dp_grid(grid, WeightVector([0.7, 0.6]))
        assert all(rep.holds for rep in out.values())

    def test_ragged_grid_rejected(self):
        with pytest.raises(ContractError):
            verify_dp_grid([[A, B], [A]], WeightVector([0.5, 0.5]))

    def test_norm_p_selectable(self):
        for p in (1, 2, math.inf):
            out = verify_dp_grid([[A, B]], WeightVector([0.5, 0.5]), p=p)
            assert out["norm"].holds
