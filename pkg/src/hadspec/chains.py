"""Catalog of inequality chains over Hadamard and ordinary products.

Every entry evaluates the left-to-right terms of one proved chain on
concrete operands and reports the slacks.  A report can be in one of three
states: holds, violated, or inconclusive (some spectral estimate failed to
converge, which never counts as a violation).

Elementwise chains are scalarized as the worst relative violation margin
against 0, consistent with ``nnmatrix.elementwise_le``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .nnmatrix import (
    NonNegativeMatrix,
    WeightVector,
    WEIGHT_SUM_SLACK,
    cyclic_products,
    hadamard_power,
    hadamard_product_chain,
    hadamard_weighted_geomean,
    le_margin,
    matmul_chain,
)
from .spectral import (
    DEFAULT_CONFIG,
    SpectralConstraintError,
    ToleranceConfig,
    matrix_exp,
    numerical_radius,
    operator_norm,
    resolvent,
    spectral_radius,
)

DEFAULT_CHAIN_TOL = 1e-9


class ContractError(ValueError):
    """Operand arity, shape, or parameter contract of a chain is violated."""


class ChainId(str, Enum):
    AUDENAERT = "audenaert"
    HORN_ZHANG = "horn_zhang"
    SCHEP_CORRECTED = "schep_corrected"
    PEPERKO_MIX = "peperko_mix"
    HUANG = "huang"
    GEO_MEAN = "geo_mean"
    EJS_PRODUCT = "ejs_product"
    WEIGHTED_MEAN_RHO = "weighted_mean_rho"
    WEIGHTED_MEAN_NORM = "weighted_mean_norm"
    HPOW_RHO = "hpow_rho"
    HPOW_NORM = "hpow_norm"
    HPOW_LE = "hpow_le"
    DP_GRID_RHO = "dp_grid_rho"
    DP_GRID_NORM = "dp_grid_norm"
    DP_GRID_LE = "dp_grid_le"
    NUMRAD_GRID = "numrad_grid"
    NUMRAD_WEIGHTED = "numrad_weighted"
    GENP1_RHO = "genP1_rho"
    GENP1_NORM = "genP1_norm"
    GENP1_NUMRAD = "genP1_numrad"
    TWO_MATRIX_T = "two_matrix_t"
    CHEN_ZHANG = "chen_zhang"
    GRAM = "gram"
    ALT_TRANSPOSE = "alt_transpose"
    ATB = "atb"
    ABTC = "abtc"
    JORDAN = "jordan"
    CS_NUMRAD = "cs_numrad"
    SPECTRAL_MAP_EXP = "spectral_map_exp"
    SPECTRAL_MAP_RESOLVENT = "spectral_map_resolvent"
    POWER_SERIES = "power_series"


@dataclass(frozen=True)
class ChainTerm:
    """One evaluated term: its catalog label, scalar value, and whether every
    spectral estimate feeding it converged."""

    label: str
    value: float
    converged: bool

    def to_json_dict(self) -> dict:
        return {"label": self.label, "value": self.value, "converged": self.converged}


@dataclass(frozen=True)
class ChainReport:
    chain: str
    params: dict
    terms: tuple[ChainTerm, ...]
    holds: bool
    inconclusive: bool
    min_slack: float
    tol: float

    @property
    def violated(self) -> bool:
        """A genuine violation: ordering failed with every estimate converged."""
        return not self.holds and not self.inconclusive

    def to_json_dict(self) -> dict:
        return {
            "chain": self.chain,
            "params": self.params,
            "terms": [t.to_json_dict() for t in self.terms],
            "holds": self.holds,
            "inconclusive": self.inconclusive,
            "min_slack": self.min_slack,
            "tol": self.tol,
        }


def _assemble(chain: ChainId, params: dict, terms: list[tuple[str, float, bool]], tol: float) -> ChainReport:
    if len(terms) < 2:
        raise ContractError(f"{chain.value}: a chain needs at least two terms")
    tuples = tuple(ChainTerm(label, float(value), bool(conv)) for label, value, conv in terms)
    slacks = [b.value - a.value for a, b in zip(tuples, tuples[1:])]
    pairs_ok = all(a.value <= b.value + tol * max(1.0, b.value) for a, b in zip(tuples, tuples[1:]))
    inconclusive = not all(t.converged for t in tuples)
    return ChainReport(
        chain=chain.value,
        params=params,
        terms=tuples,
        holds=pairs_ok and not inconclusive,
        inconclusive=inconclusive,
        min_slack=float(min(slacks)),
        tol=tol,
    )


# -- scalar helpers ----------------------------------------------------------

def _rho(m: NonNegativeMatrix, cfg: ToleranceConfig) -> tuple[float, bool]:
    e = spectral_radius(m, cfg)
    return e.value, e.converged


def _norm(m: NonNegativeMatrix, p, cfg: ToleranceConfig) -> tuple[float, bool]:
    e = operator_norm(m, p, cfg)
    return e.value, e.converged


def _w(m: NonNegativeMatrix, cfg: ToleranceConfig) -> tuple[float, bool]:
    e = numerical_radius(m, cfg)
    return e.value, e.converged


def _matpow(m: NonNegativeMatrix, k: int) -> NonNegativeMatrix:
    return matmul_chain([m] * k)


def _rotations(mats: Sequence[NonNegativeMatrix]) -> list[list[NonNegativeMatrix]]:
    return [list(mats[i:]) + list(mats[:i]) for i in range(len(mats))]


def _alt_product(mats: Sequence[NonNegativeMatrix], start: int, length: int,
                 transpose_even_positions: bool) -> NonNegativeMatrix:
    """Product of `length` cyclically-indexed factors from `start`, transposing
    factors at even 0-based positions (or odd ones when the flag is False)."""
    m = len(mats)
    factors = []
    for j in range(length):
        a = mats[(start + j) % m]
        if (j % 2 == 0) == transpose_even_positions:
            a = a.T
        factors.append(a)
    return matmul_chain(factors)


# -- catalog evaluators ------------------------------------------------------
# Each returns the ordered (label, value, converged) list.

def _eval_audenaert(mats, params, cfg):
    a, b = mats
    t1 = _rho(hadamard_product_chain([a, b]), cfg)
    mid = matmul_chain([hadamard_product_chain([a, a]), hadamard_product_chain([b, b])])
    t2 = _rho(mid, cfg)
    t3 = _rho(matmul_chain([a, b]), cfg)
    return [
        ("rho(A o B)", t1[0], t1[1]),
        ("rho^{1/2}((A o A)(B o B))", math.sqrt(t2[0]), t2[1]),
        ("rho(A B)", t3[0], t3[1]),
    ]


def _eval_horn_zhang(mats, params, cfg):
    a, b = mats
    ab, ba = matmul_chain([a, b]), matmul_chain([b, a])
    t1 = _rho(hadamard_product_chain([a, b]), cfg)
    t2 = _rho(hadamard_product_chain([ab, ba]), cfg)
    t3 = _rho(ab, cfg)
    return [
        ("rho(A o B)", t1[0], t1[1]),
        ("rho^{1/2}(A B o B A)", math.sqrt(t2[0]), t2[1]),
        ("rho(A B)", t3[0], t3[1]),
    ]


def _eval_schep_corrected(mats, params, cfg):
    a, b = mats
    ab = matmul_chain([a, b])
    t1 = _rho(hadamard_product_chain([a, b]), cfg)
    t2 = _rho(matmul_chain([hadamard_product_chain([a, a]), hadamard_product_chain([b, b])]), cfg)
    t3 = _rho(hadamard_product_chain([ab, ab]), cfg)
    t4 = _rho(ab, cfg)
    return [
        ("rho(A o B)", t1[0], t1[1]),
        ("rho^{1/2}((A o A)(B o B))", math.sqrt(t2[0]), t2[1]),
        ("rho^{1/2}(A B o A B)", math.sqrt(t3[0]), t3[1]),
        ("rho(A B)", t4[0], t4[1]),
    ]


def _eval_peperko_mix(mats, params, cfg):
    a, b = mats
    ab, ba = matmul_chain([a, b]), matmul_chain([b, a])
    t1 = _rho(hadamard_product_chain([a, b]), cfg)
    t2 = _rho(matmul_chain([hadamard_product_chain([a, a]), hadamard_product_chain([b, b])]), cfg)
    t3a = _rho(hadamard_product_chain([ab, ab]), cfg)
    t3b = _rho(hadamard_product_chain([ba, ba]), cfg)
    t4 = _rho(ab, cfg)
    return [
        ("rho(A o B)", t1[0], t1[1]),
        ("rho^{1/2}((A o A)(B o B))", math.sqrt(t2[0]), t2[1]),
        ("rho^{1/4}(A B o A B) rho^{1/4}(B A o B A)", t3a[0] ** 0.25 * t3b[0] ** 0.25, t3a[1] and t3b[1]),
        ("rho(A B)", t4[0], t4[1]),
    ]


def _eval_huang(mats, params, cfg):
    t1 = _rho(hadamard_product_chain(mats), cfg)
    t2 = _rho(matmul_chain(mats), cfg)
    return [
        ("rho(A1 o ... o Am)", t1[0], t1[1]),
        ("rho(A1 A2 ... Am)", t2[0], t2[1]),
    ]


def _eval_geo_mean(mats, params, cfg):
    m = len(mats)
    w = WeightVector([1.0 / m] * m)
    t1 = _rho(hadamard_weighted_geomean(mats, w), cfg)
    t2 = _rho(matmul_chain(mats), cfg)
    return [
        ("rho(A1^(1/m) o ... o Am^(1/m))", t1[0], t1[1]),
        ("rho(A1 A2 ... Am)^{1/m}", t2[0] ** (1.0 / m), t2[1]),
    ]


def _eval_ejs_product(mats, params, cfg):
    t1 = _rho(hadamard_product_chain(mats), cfg)
    parts = [_rho(a, cfg) for a in mats]
    return [
        ("rho(A1 o ... o Am)", t1[0], t1[1]),
        ("rho(A1) rho(A2) ... rho(Am)", math.prod(v for v, _ in parts), all(c for _, c in parts)),
    ]


def _eval_weighted_mean_rho(mats, params, cfg):
    w: WeightVector = params["alphas"]
    t1 = _rho(hadamard_weighted_geomean(mats, w), cfg)
    parts = [_rho(a, cfg) for a in mats]
    rhs = math.prod(v ** alpha for (v, _), alpha in zip(parts, w.alphas))
    return [
        ("rho(A1^(a1) o ... o Am^(am))", t1[0], t1[1]),
        ("rho(A1)^{a1} ... rho(Am)^{am}", rhs, all(c for _, c in parts)),
    ]


def _eval_weighted_mean_norm(mats, params, cfg):
    w: WeightVector = params["alphas"]
    p = params["p"]
    t1 = _norm(hadamard_weighted_geomean(mats, w), p, cfg)
    parts = [_norm(a, p, cfg) for a in mats]
    rhs = math.prod(v ** alpha for (v, _), alpha in zip(parts, w.alphas))
    return [
        ("||A1^(a1) o ... o Am^(am)||", t1[0], t1[1]),
        ("||A1||^{a1} ... ||Am||^{am}", rhs, all(c for _, c in parts)),
    ]


def _eval_hpow_rho(mats, params, cfg):
    t = params["t"]
    t1 = _rho(matmul_chain([hadamard_power(a, t) for a in mats]), cfg)
    t2 = _rho(matmul_chain(mats), cfg)
    return [
        ("rho(A1^(t) ... Am^(t))", t1[0], t1[1]),
        ("rho(A1 ... Am)^t", t2[0] ** t, t2[1]),
    ]


def _eval_hpow_norm(mats, params, cfg):
    t, p = params["t"], params["p"]
    t1 = _norm(matmul_chain([hadamard_power(a, t) for a in mats]), p, cfg)
    t2 = _norm(matmul_chain(mats), p, cfg)
    return [
        ("||A1^(t) ... Am^(t)||", t1[0], t1[1]),
        ("||A1 ... Am||^t", t2[0] ** t, t2[1]),
    ]


def _eval_hpow_le(mats, params, cfg):
    t = params["t"]
    lhs = matmul_chain([hadamard_power(a, t) for a in mats])
    rhs = hadamard_power(matmul_chain(mats), t)
    return [
        ("max_ij ((A1^(t) ... Am^(t)) - (A1 ... Am)^(t)) / max(1, rhs)", le_margin(lhs, rhs), True),
        ("0", 0.0, True),
    ]


def _grid_rows(mats, params):
    w: WeightVector = params["alphas"]
    m = len(w)
    k = params["k"]
    if len(mats) != k * m:
        raise ContractError(f"grid chain expects k*m = {k * m} matrices, got {len(mats)}")
    return [list(mats[i * m:(i + 1) * m]) for i in range(k)], w, k, m


def _grid_lhs(rows, w):
    return matmul_chain([hadamard_weighted_geomean(row, w) for row in rows])


def _grid_columns(rows, m):
    return [matmul_chain([row[j] for row in rows]) for j in range(m)]


def _eval_dp_grid_rho(mats, params, cfg):
    rows, w, k, m = _grid_rows(mats, params)
    t1 = _rho(_grid_lhs(rows, w), cfg)
    parts = [_rho(col, cfg) for col in _grid_columns(rows, m)]
    rhs = math.prod(v ** a for (v, _), a in zip(parts, w.alphas))
    return [
        ("rho((A11^(a1) o ... o A1m^(am)) ... (Ak1^(a1) o ... o Akm^(am)))", t1[0], t1[1]),
        ("rho(A11 ... Ak1)^{a1} ... rho(A1m ... Akm)^{am}", rhs, all(c for _, c in parts)),
    ]


def _eval_dp_grid_norm(mats, params, cfg):
    rows, w, k, m = _grid_rows(mats, params)
    p = params["p"]
    t1 = _norm(_grid_lhs(rows, w), p, cfg)
    parts = [_norm(col, p, cfg) for col in _grid_columns(rows, m)]
    rhs = math.prod(v ** a for (v, _), a in zip(parts, w.alphas))
    return [
        ("||(A11^(a1) o ... o A1m^(am)) ... (Ak1^(a1) o ... o Akm^(am))||", t1[0], t1[1]),
        ("||A11 ... Ak1||^{a1} ... ||A1m ... Akm||^{am}", rhs, all(c for _, c in parts)),
    ]


def _eval_dp_grid_le(mats, params, cfg):
    rows, w, k, m = _grid_rows(mats, params)
    lhs = _grid_lhs(rows, w)
    cols = _grid_columns(rows, m)
    rhs = hadamard_product_chain([hadamard_power(col, a) for col, a in zip(cols, w.alphas)])
    return [
        ("max_ij (lhs - (A11...Ak1)^(a1) o ... o (A1m...Akm)^(am)) / max(1, rhs)", le_margin(lhs, rhs), True),
        ("0", 0.0, True),
    ]


def _eval_numrad_grid(mats, params, cfg):
    rows, w, k, m = _grid_rows(mats, params)
    t1 = _w(_grid_lhs(rows, w), cfg)
    parts = [_w(col, cfg) for col in _grid_columns(rows, m)]
    rhs = math.prod(v ** a for (v, _), a in zip(parts, w.alphas))
    return [
        ("w((A11^(a1) o ... o A1m^(am)) ... (Ak1^(a1) o ... o Akm^(am)))", t1[0], t1[1]),
        ("w(A11 ... Ak1)^{a1} ... w(A1m ... Akm)^{am}", rhs, all(c for _, c in parts)),
    ]


def _eval_numrad_weighted(mats, params, cfg):
    w: WeightVector = params["alphas"]
    t1 = _w(hadamard_weighted_geomean(mats, w), cfg)
    parts = [_w(a, cfg) for a in mats]
    rhs = math.prod(v ** alpha for (v, _), alpha in zip(parts, w.alphas))
    return [
        ("w(A1^(a1) o ... o Am^(am))", t1[0], t1[1]),
        ("w(A1)^{a1} ... w(Am)^{am}", rhs, all(c for _, c in parts)),
    ]


def _genp1_pieces(mats, t):
    m = len(mats)
    cyc = cyclic_products(mats, t)
    geomean = hadamard_product_chain([hadamard_power(p, 1.0 / t) for p in cyc])
    return m, cyc, geomean


def _eval_genp1_rho(mats, params, cfg):
    t = params["t"]
    m, cyc, geomean = _genp1_pieces(mats, t)
    prod = matmul_chain(mats)
    t1 = _rho(hadamard_product_chain(mats), cfg)
    t2 = _rho(geomean, cfg)
    t3 = _rho(cyc[0], cfg)
    t4 = _rho(hadamard_power(prod, t), cfg)
    t5 = _rho(prod, cfg)
    return [
        ("rho(A1 o ... o Am)", t1[0], t1[1]),
        ("rho(P1^(1/t) o ... o Pm^(1/t))^{1/m}", t2[0] ** (1.0 / m), t2[1]),
        ("rho(A1^(t) ... Am^(t))^{1/t}", t3[0] ** (1.0 / t), t3[1]),
        ("rho((A1 ... Am)^(t))^{1/t}", t4[0] ** (1.0 / t), t4[1]),
        ("rho(A1 ... Am)", t5[0], t5[1]),
    ]


def _eval_genp1_norm(mats, params, cfg):
    t, p = params["t"], params["p"]
    m, cyc, geomean = _genp1_pieces(mats, t)
    rot_prods = [matmul_chain(rot) for rot in _rotations(mats)]
    t1 = _norm(_matpow(hadamard_product_chain(mats), m), p, cfg)
    t2 = _norm(geomean, p, cfg)
    parts3 = [_norm(pi, p, cfg) for pi in cyc]
    parts4 = [_norm(hadamard_power(rp, t), p, cfg) for rp in rot_prods]
    parts5 = [_norm(rp, p, cfg) for rp in rot_prods]
    return [
        ("||(A1 o ... o Am)^m||", t1[0], t1[1]),
        ("||P1^(1/t) o ... o Pm^(1/t)||", t2[0], t2[1]),
        ("(||P1|| ... ||Pm||)^{1/t}", math.prod(v for v, _ in parts3) ** (1.0 / t), all(c for _, c in parts3)),
        ("(||(A1 A2...Am)^(t)|| ||(A2...Am A1)^(t)|| ... ||(Am A1...Am-1)^(t)||)^{1/t}",
         math.prod(v for v, _ in parts4) ** (1.0 / t), all(c for _, c in parts4)),
        ("||A1 A2...Am|| ||A2...Am A1|| ... ||Am A1...Am-1||",
         math.prod(v for v, _ in parts5), all(c for _, c in parts5)),
    ]


def _eval_genp1_numrad(mats, params, cfg):
    m = len(mats)
    t = float(m)
    _, cyc, geomean = _genp1_pieces(mats, t)
    rot_prods = [matmul_chain(rot) for rot in _rotations(mats)]
    t1 = _w(_matpow(hadamard_product_chain(mats), m), cfg)
    t2 = _w(geomean, cfg)
    parts3 = [_w(pi, cfg) for pi in cyc]
    parts4 = [_w(hadamard_power(rp, t), cfg) for rp in rot_prods]
    return [
        ("w((A1 o ... o Am)^m)", t1[0], t1[1]),
        ("w(P1^(1/m) o ... o Pm^(1/m))", t2[0], t2[1]),
        ("(w(P1) ... w(Pm))^{1/m}", math.prod(v for v, _ in parts3) ** (1.0 / m), all(c for _, c in parts3)),
        ("(w((A1 A2...Am)^(m)) w((A2...Am A1)^(m)) ... w((Am A1...Am-1)^(m)))^{1/m}",
         math.prod(v for v, _ in parts4) ** (1.0 / m), all(c for _, c in parts4)),
    ]


def _eval_two_matrix_t(mats, params, cfg):
    variant = params["variant"]
    if variant == "rho":
        return _eval_genp1_rho(mats, params, cfg)
    if variant == "norm":
        return _eval_genp1_norm(mats, params, cfg)
    return _eval_genp1_numrad(mats, params, cfg)


def _eval_chen_zhang(mats, params, cfg):
    t = params["t"]
    m, cyc, geomean = _genp1_pieces(mats, t)
    prod = matmul_chain(mats)
    h = _rho(hadamard_product_chain(mats), cfg)
    g = _rho(geomean, cfg)
    p1 = _rho(cyc[0], cfg)
    pt = _rho(hadamard_power(prod, t), cfg)
    pr = _rho(prod, cfg)
    interp = h[0] ** (1.0 - t / m)
    return [
        ("rho(A1 o ... o Am)", h[0], h[1]),
        ("rho(A1 o ... o Am)^{1-t/m} rho(P1^(1/t) o ... o Pm^(1/t))^{t/m^2}",
         interp * g[0] ** (t / m ** 2), h[1] and g[1]),
        ("rho(A1 o ... o Am)^{1-t/m} rho(A1^(t) ... Am^(t))^{1/m}",
         interp * p1[0] ** (1.0 / m), h[1] and p1[1]),
        ("rho(A1 o ... o Am)^{1-t/m} rho((A1 ... Am)^(t))^{1/m}",
         interp * pt[0] ** (1.0 / m), h[1] and pt[1]),
        ("rho(A1 A2 ... Am)", pr[0], pr[1]),
    ]


def _eval_gram(mats, params, cfg):
    t = params["t"]
    m = len(mats)
    grams = [matmul_chain([a, a.T]) for a in mats]
    cyc = cyclic_products(grams, t)
    geomean = hadamard_product_chain([hadamard_power(ti, 1.0 / t) for ti in cyc])
    sprod = matmul_chain(grams)
    t1 = _norm(hadamard_product_chain(mats), 2, cfg)
    t2 = _rho(hadamard_product_chain(grams), cfg)
    t3 = _rho(geomean, cfg)
    t4 = _rho(cyc[0], cfg)
    t5 = _rho(hadamard_power(sprod, t), cfg)
    t6 = _rho(sprod, cfg)
    return [
        ("||A1 o ... o Am||^2", t1[0] ** 2, t1[1]),
        ("rho(S1 o ... o Sm)", t2[0], t2[1]),
        ("rho(T1^(1/t) o ... o Tm^(1/t))^{1/m}", t3[0] ** (1.0 / m), t3[1]),
        ("rho(S1^(t) ... Sm^(t))^{1/t}", t4[0] ** (1.0 / t), t4[1]),
        ("rho((S1 ... Sm)^(t))^{1/t}", t5[0] ** (1.0 / t), t5[1]),
        ("rho(S1 ... Sm)", t6[0], t6[1]),
    ]


def _eval_alt_transpose(mats, params, cfg):
    m = len(mats)
    t1 = _norm(hadamard_product_chain(mats), 2, cfg)
    if m % 2 == 0:
        factors = [_alt_product(mats, i, m, True) for i in range(m)]
        t2 = _rho(hadamard_product_chain(factors), cfg)
        parts = [_rho(f, cfg) for f in factors]
        ta = _rho(_alt_product(mats, 0, m, True), cfg)
        tb = _rho(_alt_product(mats, 0, m, False), cfg)
        return [
            ("||A1 o ... o Am||^2", t1[0] ** 2, t1[1]),
            ("rho((A1' A2 A3' A4 ...) o (A2' A3 ...) o ... o (Am' A1 ...))^{2/m}",
             t2[0] ** (2.0 / m), t2[1]),
            ("(rho(H1) rho(H2) ... rho(Hm))^{2/m}",
             math.prod(v for v, _ in parts) ** (2.0 / m), all(c for _, c in parts)),
            ("rho(A1' A2 A3' A4 ... Am-1' Am) rho(A1 A2' A3 A4' ... Am-1 Am')",
             ta[0] * tb[0], ta[1] and tb[1]),
        ]
    factors = [_alt_product(mats, i, 2 * m, True) for i in range(m)]
    t2 = _rho(hadamard_product_chain(factors), cfg)
    parts = [_rho(f, cfg) for f in factors]
    tb = _rho(_alt_product(mats, 0, 2 * m, False), cfg)
    return [
        ("||A1 o ... o Am||^2", t1[0] ** 2, t1[1]),
        ("rho((A1' A2 ... Am' ... wrap twice) o ...)^{1/m}", t2[0] ** (1.0 / m), t2[1]),
        ("(rho(G1) rho(G2) ... rho(Gm))^{1/m}",
         math.prod(v for v, _ in parts) ** (1.0 / m), all(c for _, c in parts)),
        ("rho(A1 A2' A3 A4' ... Am A1' A2 ... Am')", tb[0], tb[1]),
    ]


def _eval_atb(mats, params, cfg):
    a, b = mats
    atb_ = matmul_chain([a.T, b])
    bta = matmul_chain([b.T, a])
    t1 = _norm(hadamard_product_chain([a, b]), 2, cfg)
    t2 = _rho(hadamard_product_chain([atb_, bta]), cfg)
    t3 = _rho(atb_, cfg)
    return [
        ("||A o B||", t1[0], t1[1]),
        ("rho^{1/2}((A' B) o (B' A))", math.sqrt(t2[0]), t2[1]),
        ("rho(A' B)", t3[0], t3[1]),
    ]


def _eval_abtc(mats, params, cfg):
    a, b, c = mats
    f1 = matmul_chain([a.T, b, c.T, a, b.T, c])
    f2 = matmul_chain([b.T, c, a.T, b, c.T, a])
    f3 = matmul_chain([c.T, a, b.T, c, a.T, b])
    t1 = _norm(hadamard_product_chain([a, b, c]), 2, cfg)
    t2 = _rho(hadamard_product_chain([f1, f2, f3]), cfg)
    t3 = _rho(matmul_chain([a, b.T, c, a.T, b, c.T]), cfg)
    return [
        ("||A o B o C||", t1[0], t1[1]),
        ("rho^{1/6}((A' B C' A B' C) o (B' C A' B C' A) o (C' A B' C A' B))", t2[0] ** (1.0 / 6.0), t2[1]),
        ("rho^{1/2}(A B' C A' B C')", math.sqrt(t3[0]), t3[1]),
    ]


def _eval_jordan(mats, params, cfg):
    a, b = mats
    f1 = matmul_chain([a.T, b.T, a.T, a, b, a])
    f2 = matmul_chain([b, a, a.T, b.T, a.T, a])
    f3 = matmul_chain([a.T, a, b, a, a.T, b.T])
    t1 = _norm(hadamard_product_chain([a, b.T, a]), 2, cfg)
    t2 = _rho(hadamard_product_chain([f1, f2, f3]), cfg)
    t3 = _norm(matmul_chain([a, b, a]), 2, cfg)
    return [
        ("||A o B' o A||", t1[0], t1[1]),
        ("rho^{1/6}((A' B' A' A B A) o (B A A' B' A' A) o (A' A B A A' B'))", t2[0] ** (1.0 / 6.0), t2[1]),
        ("||A B A||", t3[0], t3[1]),
    ]


def _eval_cs_numrad(mats, params, cfg):
    m = len(mats)
    t1 = _w(hadamard_product_chain(mats), cfg)
    parts = [_w(hadamard_power(a, float(m)), cfg) for a in mats]
    return [
        ("w(A1 o ... o Am)", t1[0], t1[1]),
        ("(w(A1^(m)) ... w(Am^(m)))^{1/m}",
         math.prod(v for v, _ in parts) ** (1.0 / m), all(c for _, c in parts)),
    ]


def _eval_spectral_map_exp(mats, params, cfg):
    t1 = _rho(matrix_exp(hadamard_product_chain(mats), cfg), cfg)
    t2 = _rho(matrix_exp(matmul_chain(mats), cfg), cfg)
    return [
        ("rho(exp(A1 o ... o Am))", t1[0], t1[1]),
        ("rho(exp(A1 ... Am))", t2[0], t2[1]),
    ]


def _eval_spectral_map_resolvent(mats, params, cfg):
    lam = params["lambda"]
    prod = matmul_chain(mats)
    had = hadamard_product_chain(mats)
    try:
        r_prod = resolvent(prod, lam, cfg)
        r_had = resolvent(had, lam, cfg)
    except SpectralConstraintError as exc:
        raise ContractError(str(exc)) from exc
    t1 = _rho(r_had, cfg)
    t2 = _rho(r_prod, cfg)
    return [
        ("rho((lambda I - A1 o ... o Am)^{-1})", t1[0], t1[1]),
        ("rho((lambda I - A1 ... Am)^{-1})", t2[0], t2[1]),
    ]


def _poly_apply(coeffs: Sequence[float], m: NonNegativeMatrix) -> NonNegativeMatrix:
    n = m.rows
    out = NonNegativeMatrix.zeros(n)
    for c in reversed(list(coeffs)):
        out = matmul_chain([out, m])
        if c != 0.0:
            out = NonNegativeMatrix(out.to_array() + c * NonNegativeMatrix.identity(n).to_array())
    return out


def _eval_power_series(mats, params, cfg):
    coeffs = params["coeffs"]
    t1 = _rho(_poly_apply(coeffs, hadamard_product_chain(mats)), cfg)
    t2 = _rho(_poly_apply(coeffs, matmul_chain(mats)), cfg)
    return [
        ("rho(f(A1 o ... o Am))", t1[0], t1[1]),
        ("rho(f(A1 ... Am))", t2[0], t2[1]),
    ]


# -- catalog and contracts ---------------------------------------------------

@dataclass(frozen=True)
class ChainSpecEntry:
    arity_min: int
    arity_max: int | None  # None means unbounded
    square: bool           # operands must be square (grid chains: every entry)
    evaluate: Callable
    params_doc: str


CATALOG: dict[ChainId, ChainSpecEntry] = {
    ChainId.AUDENAERT: ChainSpecEntry(2, 2, True, _eval_audenaert, ""),
    ChainId.HORN_ZHANG: ChainSpecEntry(2, 2, True, _eval_horn_zhang, ""),
    ChainId.SCHEP_CORRECTED: ChainSpecEntry(2, 2, True, _eval_schep_corrected, ""),
    ChainId.PEPERKO_MIX: ChainSpecEntry(2, 2, True, _eval_peperko_mix, ""),
    ChainId.HUANG: ChainSpecEntry(1, None, True, _eval_huang, ""),
    ChainId.GEO_MEAN: ChainSpecEntry(1, None, True, _eval_geo_mean, ""),
    ChainId.EJS_PRODUCT: ChainSpecEntry(1, None, True, _eval_ejs_product, ""),
    ChainId.WEIGHTED_MEAN_RHO: ChainSpecEntry(1, None, True, _eval_weighted_mean_rho, "alphas (sum >= 1)"),
    ChainId.WEIGHTED_MEAN_NORM: ChainSpecEntry(1, None, True, _eval_weighted_mean_norm, "alphas (sum >= 1), p"),
    ChainId.HPOW_RHO: ChainSpecEntry(1, None, True, _eval_hpow_rho, "t >= 1"),
    ChainId.HPOW_NORM: ChainSpecEntry(1, None, True, _eval_hpow_norm, "t >= 1, p"),
    ChainId.HPOW_LE: ChainSpecEntry(1, None, True, _eval_hpow_le, "t >= 1"),
    ChainId.DP_GRID_RHO: ChainSpecEntry(1, None, True, _eval_dp_grid_rho, "alphas (sum >= 1), k"),
    ChainId.DP_GRID_NORM: ChainSpecEntry(1, None, True, _eval_dp_grid_norm, "alphas (sum >= 1), k, p"),
    ChainId.DP_GRID_LE: ChainSpecEntry(1, None, True, _eval_dp_grid_le, "alphas (sum >= 1), k"),
    ChainId.NUMRAD_GRID: ChainSpecEntry(1, None, True, _eval_numrad_grid, "alphas (sum = 1), k"),
    ChainId.NUMRAD_WEIGHTED: ChainSpecEntry(1, None, True, _eval_numrad_weighted, "alphas (sum = 1)"),
    ChainId.GENP1_RHO: ChainSpecEntry(1, None, True, _eval_genp1_rho, "t in [1, m]"),
    ChainId.GENP1_NORM: ChainSpecEntry(1, None, True, _eval_genp1_norm, "t in [1, m], p"),
    ChainId.GENP1_NUMRAD: ChainSpecEntry(1, None, True, _eval_genp1_numrad, "t fixed to m"),
    ChainId.TWO_MATRIX_T: ChainSpecEntry(2, 2, True, _eval_two_matrix_t, "t in [1, 2], variant in {rho, norm, numrad}"),
    ChainId.CHEN_ZHANG: ChainSpecEntry(2, None, True, _eval_chen_zhang, "t in [1, m]"),
    ChainId.GRAM: ChainSpecEntry(1, None, False, _eval_gram, "t in [1, m]"),
    ChainId.ALT_TRANSPOSE: ChainSpecEntry(1, None, False, _eval_alt_transpose, ""),
    ChainId.ATB: ChainSpecEntry(2, 2, False, _eval_atb, ""),
    ChainId.ABTC: ChainSpecEntry(3, 3, False, _eval_abtc, ""),
    ChainId.JORDAN: ChainSpecEntry(2, 2, True, _eval_jordan, ""),
    ChainId.CS_NUMRAD: ChainSpecEntry(1, None, True, _eval_cs_numrad, ""),
    ChainId.SPECTRAL_MAP_EXP: ChainSpecEntry(1, None, True, _eval_spectral_map_exp, ""),
    ChainId.SPECTRAL_MAP_RESOLVENT: ChainSpecEntry(1, None, True, _eval_spectral_map_resolvent,
                                                   "lambda > rho(A1 ... Am)"),
    ChainId.POWER_SERIES: ChainSpecEntry(1, None, True, _eval_power_series,
                                         "coeffs (non-negative), optional tail_bound"),
}


def catalog_ids() -> list[str]:
    return [c.value for c in ChainId]


def build_report(chain, params: dict, terms: list[tuple[str, float, bool]],
                 tol: float = DEFAULT_CHAIN_TOL) -> ChainReport:
    """Assemble a report from externally computed terms (kernel discretizations
    evaluate their own terms but share the report format)."""
    return _assemble(_coerce_chain(chain), params, terms, tol)


def _coerce_chain(chain) -> ChainId:
    if isinstance(chain, ChainId):
        return chain
    try:
        return ChainId(chain)
    except ValueError:
        raise ContractError(f"unknown chain {chain!r}; valid ids: {', '.join(catalog_ids())}") from None


def _validate_params(chain: ChainId, mats: Sequence[NonNegativeMatrix], params: dict | None) -> dict:
    """Normalize the parameter map: fill defaults, coerce types, check contracts."""
    p = dict(params or {})
    m = len(mats)
    out: dict = {}

    if chain in (ChainId.HPOW_RHO, ChainId.HPOW_NORM, ChainId.HPOW_LE):
        t = float(p.pop("t", 1.0))
        if not t >= 1.0:
            raise ContractError(f"{chain.value}: t must be >= 1, got {t}")
        out["t"] = t
    elif chain in (ChainId.GENP1_RHO, ChainId.GENP1_NORM, ChainId.CHEN_ZHANG, ChainId.GRAM):
        t = float(p.pop("t", 1.0))
        if not 1.0 - 1e-12 <= t <= m + 1e-12:
            raise ContractError(f"{chain.value}: t must lie in [1, m] = [1, {m}], got {t}")
        out["t"] = min(max(t, 1.0), float(m))
    elif chain is ChainId.TWO_MATRIX_T:
        variant = p.pop("variant", "rho")
        if variant not in ("rho", "norm", "numrad"):
            raise ContractError(f"two_matrix_t: variant must be rho, norm or numrad, got {variant!r}")
        t = float(p.pop("t", 2.0 if variant == "numrad" else 1.0))
        if not 1.0 - 1e-12 <= t <= 2.0 + 1e-12:
            raise ContractError(f"two_matrix_t: t must lie in [1, 2], got {t}")
        if variant == "numrad" and abs(t - 2.0) > 1e-12:
            raise ContractError("two_matrix_t: the numerical-radius variant requires t = 2")
        out["variant"] = variant
        out["t"] = min(max(t, 1.0), 2.0)
        if variant == "norm":
            out["p"] = _coerce_p(p.pop("p", 2))
    elif chain is ChainId.GENP1_NUMRAD:
        t = p.pop("t", None)
        if t is not None and abs(float(t) - m) > 1e-12:
            raise ContractError(f"genP1_numrad: t is fixed to m = {m}, got {t}")

    if chain in (ChainId.WEIGHTED_MEAN_RHO, ChainId.WEIGHTED_MEAN_NORM, ChainId.NUMRAD_WEIGHTED):
        out["alphas"] = _coerce_weights(chain, p.pop("alphas", None), m)
    elif chain in (ChainId.DP_GRID_RHO, ChainId.DP_GRID_NORM, ChainId.DP_GRID_LE, ChainId.NUMRAD_GRID):
        w = _coerce_weights(chain, p.pop("alphas", None), 0)
        k = p.pop("k", None)
        if k is None:
            if len(mats) % len(w) != 0:
                raise ContractError(f"{chain.value}: {len(mats)} matrices do not tile rows of width {len(w)}")
            k = len(mats) // len(w)
        k = int(k)
        if k < 1:
            raise ContractError(f"{chain.value}: k must be >= 1, got {k}")
        out["alphas"] = w
        out["k"] = k

    if chain in (ChainId.WEIGHTED_MEAN_NORM, ChainId.HPOW_NORM, ChainId.DP_GRID_NORM, ChainId.GENP1_NORM):
        out["p"] = _coerce_p(p.pop("p", 2))

    if chain is ChainId.SPECTRAL_MAP_RESOLVENT:
        if "lambda" not in p:
            raise ContractError("spectral_map_resolvent: lambda is required")
        out["lambda"] = float(p.pop("lambda"))

    if chain is ChainId.POWER_SERIES:
        coeffs = p.pop("coeffs", None)
        if not coeffs:
            raise ContractError("power_series: a non-empty coefficient list is required")
        coeffs = [float(c) for c in coeffs]
        if any(not math.isfinite(c) or c < 0.0 for c in coeffs):
            raise ContractError("power_series: coefficients must be finite and >= 0")
        out["coeffs"] = coeffs
        tail = p.pop("tail_bound", None)
        if tail is not None:
            out["tail_bound"] = float(tail)

    if p:
        raise ContractError(f"{chain.value}: unexpected parameters {sorted(p)}")
    return out


def _coerce_p(p):
    if p in (1, 2):
        return int(p)
    if p in (math.inf, "inf", "Infinity"):
        return math.inf
    raise ContractError(f"p must be 1, 2 or inf, got {p!r}")


def _coerce_weights(chain: ChainId, alphas, m: int) -> WeightVector:
    if alphas is None:
        raise ContractError(f"{chain.value}: alphas are required")
    w = alphas if isinstance(alphas, WeightVector) else WeightVector(alphas)
    if chain in (ChainId.NUMRAD_WEIGHTED, ChainId.NUMRAD_GRID):
        if abs(w.total - 1.0) > WEIGHT_SUM_SLACK:
            raise ContractError(f"{chain.value}: weights must sum to 1, got {w.total}")
    elif w.total < 1.0 - WEIGHT_SUM_SLACK:
        raise ContractError(f"{chain.value}: weights must sum to at least 1, got {w.total}")
    if chain in (ChainId.WEIGHTED_MEAN_RHO, ChainId.WEIGHTED_MEAN_NORM, ChainId.NUMRAD_WEIGHTED) and len(w) != m:
        raise ContractError(f"{chain.value}: {m} matrices but {len(w)} weights")
    return w


def _validate_mats(chain: ChainId, entry: ChainSpecEntry, mats: Sequence[NonNegativeMatrix],
                   params: dict) -> None:
    m = len(mats)
    arity = m
    if chain in (ChainId.DP_GRID_RHO, ChainId.DP_GRID_NORM, ChainId.DP_GRID_LE, ChainId.NUMRAD_GRID):
        arity = m  # total grid entries; per-row width checked in the evaluator
    if arity < entry.arity_min or (entry.arity_max is not None and arity > entry.arity_max):
        bound = f"exactly {entry.arity_min}" if entry.arity_min == entry.arity_max else f">= {entry.arity_min}"
        raise ContractError(f"{chain.value}: expects {bound} matrices, got {m}")
    if not mats:
        raise ContractError(f"{chain.value}: no operands")
    if chain is ChainId.JORDAN:
        a, b = mats
        if b.T.shape != a.shape:
            raise ContractError("jordan: B transposed must match the shape of A")
        if not a.is_square():
            raise ContractError("jordan: operands must be square")
        return
    shape = mats[0].shape
    for a in mats:
        if a.shape != shape:
            raise ContractError(f"{chain.value}: operands must share one shape, got {a.shape} vs {shape}")
        if entry.square and not a.is_square():
            raise ContractError(f"{chain.value}: operands must be square, got {a.shape}")


def evaluate_chain(chain, mats: Sequence[NonNegativeMatrix], params: dict | None = None,
                   cfg: ToleranceConfig = DEFAULT_CONFIG, tol: float = DEFAULT_CHAIN_TOL) -> ChainReport:
    """Evaluate one catalog chain on concrete operands.

    Raises :class:`ContractError` on arity/shape/parameter violations; a
    non-converged estimate yields an inconclusive report rather than an
    exception or a violation.
    """
    cid = _coerce_chain(chain)
    entry = CATALOG[cid]
    norm_params = _validate_params(cid, mats, params)
    _validate_mats(cid, entry, mats, norm_params)
    terms = entry.evaluate(mats, norm_params, cfg)
    return _assemble(cid, _params_to_jsonable(norm_params), terms, tol)


def _params_to_jsonable(params: dict) -> dict:
    out = {}
    for key, value in params.items():
        if isinstance(value, WeightVector):
            out[key] = list(value.alphas)
        elif value is math.inf:
            out[key] = "inf"
        else:
            out[key] = value
    return out


# -- monotone scans ----------------------------------------------------------

@dataclass(frozen=True)
class MonotoneReport:
    """Grid evaluation of r(t) = (prod rho(Ai^(t)))^{1/t} and its norm analogue.

    Both functions are non-increasing on [1, inf); the Hadamard-product
    spectral radius (resp. norm) bounds them below only on [1, m], so the
    bounded flags consider just the grid points with t <= m.
    """

    t_grid: tuple[float, ...]
    r_values: tuple[float, ...]
    n_values: tuple[float, ...]
    lower_bound_rho: float
    lower_bound_norm: float
    monotone_r: bool
    monotone_n: bool
    bounded_r: bool
    bounded_n: bool
    tol: float
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "t_grid": list(self.t_grid),
            "r_values": list(self.r_values),
            "n_values": list(self.n_values),
            "lower_bound_rho": self.lower_bound_rho,
            "lower_bound_norm": self.lower_bound_norm,
            "monotone_r": self.monotone_r,
            "monotone_n": self.monotone_n,
            "bounded_r": self.bounded_r,
            "bounded_n": self.bounded_n,
            "tol": self.tol,
            "converged": self.converged,
        }


def _check_scan_args(mats, t_grid):
    if not mats:
        raise ContractError("scan: no operands")
    n = mats[0].rows
    for a in mats:
        if not a.is_square() or a.rows != n:
            raise ContractError("scan: operands must be square of one size")
    grid = [float(t) for t in t_grid]
    if not grid:
        raise ContractError("scan: empty t grid")
    if grid[0] < 1.0:
        raise ContractError(f"scan: grid must start at t >= 1, got {grid[0]}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ContractError("scan: grid must be strictly increasing")
    return grid


def scan_monotone(mats: Sequence[NonNegativeMatrix], t_grid: Sequence[float],
                  cfg: ToleranceConfig = DEFAULT_CONFIG, tol: float = DEFAULT_CHAIN_TOL) -> MonotoneReport:
    grid = _check_scan_args(mats, t_grid)
    m = len(mats)
    r_vals, n_vals, converged = [], [], True
    for t in grid:
        powered = [hadamard_power(a, t) for a in mats]
        rhos = [spectral_radius(a, cfg) for a in powered]
        norms = [operator_norm(a, 2, cfg) for a in powered]
        converged = converged and all(e.converged for e in rhos + norms)
        r_vals.append(math.prod(e.value for e in rhos) ** (1.0 / t))
        n_vals.append(math.prod(e.value for e in norms) ** (1.0 / t))
    had = hadamard_product_chain(mats)
    lb_rho = spectral_radius(had, cfg)
    lb_norm = operator_norm(had, 2, cfg)
    converged = converged and lb_rho.converged and lb_norm.converged

    def non_increasing(vals):
        return all(b <= a + tol * max(1.0, a) for a, b in zip(vals, vals[1:]))

    def bounded(vals, lb):
        in_range = [(t, v) for t, v in zip(grid, vals) if t <= m + 1e-12]
        return all(lb <= v + tol * max(1.0, v) for _, v in in_range)

    return MonotoneReport(
        t_grid=tuple(grid),
        r_values=tuple(r_vals),
        n_values=tuple(n_vals),
        lower_bound_rho=lb_rho.value,
        lower_bound_norm=lb_norm.value,
        monotone_r=non_increasing(r_vals),
        monotone_n=non_increasing(n_vals),
        bounded_r=bounded(r_vals, lb_rho.value),
        bounded_n=bounded(n_vals, lb_norm.value),
        tol=tol,
        converged=converged,
    )


def scan_numrad(mats: Sequence[NonNegativeMatrix], t_grid: Sequence[float],
                cfg: ToleranceConfig = DEFAULT_CONFIG) -> list[float]:
    """(prod_i w(Ai^(t)))^{1/t} on the grid.

    Deliberately carries no monotone flag: unlike r and N this quantity can
    increase in t (witness the 2x2 upper-shift matrix), so callers get the
    raw values only.
    """
    grid = _check_scan_args(mats, t_grid)
    out = []
    for t in grid:
        vals = [numerical_radius(hadamard_power(a, t), cfg) for a in mats]
        out.append(math.prod(e.value for e in vals) ** (1.0 / t))
    return out


def verify_dp_grid(grid: Sequence[Sequence[NonNegativeMatrix]], w: WeightVector,
                   cfg: ToleranceConfig = DEFAULT_CONFIG, p=2,
                   tol: float = DEFAULT_CHAIN_TOL) -> dict[str, ChainReport]:
    """All three conclusions of the k x m product/Hadamard-mean comparison.

    Returns one report per conclusion, keyed "elementwise", "norm" (at the
    chosen p) and "spectral"; a single flat chain cannot hold them because
    the adjacent-pair ordering does not span different functionals.
    """
    if not grid or not grid[0]:
        raise ContractError("verify_dp_grid: grid must be non-empty")
    m = len(grid[0])
    if any(len(row) != m for row in grid):
        raise ContractError("verify_dp_grid: ragged grid")
    flat = [a for row in grid for a in row]
    base = {"alphas": w, "k": len(grid)}
    return {
        "elementwise": evaluate_chain(ChainId.DP_GRID_LE, flat, dict(base), cfg, tol),
        "norm": evaluate_chain(ChainId.DP_GRID_NORM, flat, dict(base, p=p), cfg, tol),
        "spectral": evaluate_chain(ChainId.DP_GRID_RHO, flat, dict(base), cfg, tol),
    }
