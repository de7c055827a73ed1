"""Randomized instance generation, counterexample search, tightness statistics.

The generator is a fixed SplitMix64 stream (documented below), so findings
reproduce bit-exactly across platforms and runs.  Trials derive their own
seeds from the trial index, making parallel and serial sweeps produce the
same candidates; the first hit is always the lowest trial index.

A reported violation must satisfy the no-false-positive rule: both sides
converged and the gap exceeds both the configured target and ten times the
convergence tolerance.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .chains import ChainId, ContractError, evaluate_chain
from .nnmatrix import (
    DomainError,
    NonNegativeMatrix,
    hadamard_product_chain,
    matmul_chain,
)
from .spectral import DEFAULT_CONFIG, ToleranceConfig, operator_norm, spectral_radius

# -- deterministic generator ---------------------------------------------------
#
# SplitMix64 (public-domain mixing function, canonical constants):
#   state' = (state + 0x9E3779B97F4A7C15) mod 2^64
#   z = state'; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
#   z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64
#   output = z ^ (z >> 31)
# Uniform doubles are (output >> 11) * 2^-53 in [0, 1); integer draws in
# [lo, hi] take lo + output mod (hi - lo + 1).  The k-th trial of a search
# uses the stream seeded with splitmix_output(seed XOR k*0xD1B54A32D192ED03).

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TRIAL_SALT = 0xD1B54A32D192ED03


def _mix(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """The documented pseudo-random stream; part of the external contract."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_raw(self) -> int:
        self.state, z = _mix(self.state)
        return z

    def uniform(self) -> float:
        return (self.next_raw() >> 11) * 2.0 ** -53

    def randint(self, lo: int, hi: int) -> int:
        if hi < lo:
            raise DomainError(f"empty integer range [{lo}, {hi}]")
        return lo + self.next_raw() % (hi - lo + 1)


def trial_seed(seed: int, trial: int) -> int:
    """Seed of the trial-local stream; folding the index into the seed keeps
    parallel and serial sweeps on identical candidates."""
    _, z = _mix((seed ^ (trial * _TRIAL_SALT)) & _MASK64)
    return z


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    n_range: tuple[int, int] = (2, 4)
    density: float = 1.0
    trials: int = 1000
    target_gap: float = 1e-6

    def __post_init__(self) -> None:
        lo, hi = self.n_range
        if not (1 <= lo <= hi <= 64):
            raise DomainError(f"n_range must lie within [1, 64], got {self.n_range}")
        if not 0.0 < self.density <= 1.0:
            raise DomainError(f"density must lie in (0, 1], got {self.density}")
        if not 1 <= self.trials <= 10 ** 7:
            raise DomainError(f"trials must lie in [1, 1e7], got {self.trials}")
        if not self.target_gap > 0.0:
            raise DomainError(f"target_gap must be > 0, got {self.target_gap}")


FINDING_KINDS = ("inequivalence", "sfirst_violation", "jordan_naive_violation", "extremal_slack")


@dataclass(frozen=True)
class Finding:
    """A reproducible witness: matrices plus the labeled values they produce."""

    kind: str
    matrices: tuple[NonNegativeMatrix, ...]
    values: dict
    gap: float
    seed_trail: dict

    def __post_init__(self) -> None:
        if self.kind not in FINDING_KINDS:
            raise DomainError(f"unknown finding kind {self.kind!r}")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "matrices": [m.to_json_dict() for m in self.matrices],
            "values": dict(self.values),
            "gap": self.gap,
            "seed_trail": dict(self.seed_trail),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Finding":
        return cls(
            kind=obj["kind"],
            matrices=tuple(NonNegativeMatrix.from_json_dict(m) for m in obj["matrices"]),
            values=dict(obj["values"]),
            gap=float(obj["gap"]),
            seed_trail=dict(obj["seed_trail"]),
        )


@dataclass(frozen=True)
class Exhausted:
    """Explicit negative outcome: the search ran all trials without a hit."""

    target: str
    trials: int
    seed: int

    def to_json_dict(self) -> dict:
        return {"exhausted": True, "target": self.target, "trials": self.trials, "seed": self.seed}


def random_matrix(n: int, density: float, seed: int) -> NonNegativeMatrix:
    """Entries i.i.d. uniform [0, 1) masked by Bernoulli(density).

    Row-major; each entry consumes one uniform for the value and one for
    the mask, in that order, from the SplitMix64 stream of `seed`.
    """
    if n < 1:
        raise DomainError(f"matrix size must be >= 1, got {n}")
    if not 0.0 < density <= 1.0:
        raise DomainError(f"density must lie in (0, 1], got {density}")
    stream = SplitMix64(seed)
    entries = []
    for _ in range(n * n):
        value = stream.uniform()
        keep = stream.uniform() < density
        entries.append(value if keep else 0.0)
    return NonNegativeMatrix([entries[i * n:(i + 1) * n] for i in range(n)])


def _violation_floor(reference: float, cfg: ToleranceConfig) -> float:
    return 10.0 * cfg.rel_tol * max(1.0, reference)


def inequivalence_gap(a: NonNegativeMatrix, b: NonNegativeMatrix,
                      cfg: ToleranceConfig = DEFAULT_CONFIG) -> tuple[float, dict, bool]:
    """Relative gap between rho(AB o BA) and rho(AB o AB), with both values.

    Returns (gap, labeled values, converged); scalars and symmetric A = B
    make the two terms identical, so the gap is then zero.
    """
    ab = matmul_chain([a, b])
    ba = matmul_chain([b, a])
    x = spectral_radius(hadamard_product_chain([ab, ba]), cfg)
    y = spectral_radius(hadamard_product_chain([ab, ab]), cfg)
    gap = abs(x.value - y.value) / max(1.0, y.value)
    values = {"rho(AB o BA)": x.value, "rho(AB o AB)": y.value}
    return gap, values, x.converged and y.converged


def search_inequivalence(cfg: SearchConfig,
                         tol_cfg: ToleranceConfig = DEFAULT_CONFIG) -> Finding | Exhausted:
    """First random pair separating rho(AB o BA) from rho(AB o AB)."""
    for trial in range(cfg.trials):
        stream = SplitMix64(trial_seed(cfg.seed, trial))
        n = stream.randint(*cfg.n_range)
        seed_a = stream.next_raw()
        seed_b = stream.next_raw()
        a = random_matrix(n, cfg.density, seed_a)
        b = random_matrix(n, cfg.density, seed_b)
        gap, values, converged = inequivalence_gap(a, b, tol_cfg)
        if converged and gap > max(cfg.target_gap, _violation_floor(values["rho(AB o AB)"], tol_cfg)):
            return Finding(
                kind="inequivalence",
                matrices=(a, b),
                values=values,
                gap=gap,
                seed_trail={"seed": cfg.seed, "trial": trial, "n": n, "density": cfg.density,
                            "seed_a": seed_a, "seed_b": seed_b},
            )
    return Exhausted("inequivalence", cfg.trials, cfg.seed)


# The known 2x2 pair on which the Hadamard triple product has norm 1 while
# the ordinary triple product vanishes; shipped as a regression fixture.
JORDAN_NAIVE_WITNESS = (
    NonNegativeMatrix([[0.0, 1.0], [0.0, 1.0]]),
    NonNegativeMatrix([[1.0, 1.0], [0.0, 0.0]]),
)


def violation_gap(claim: str, a: NonNegativeMatrix, b: NonNegativeMatrix,
                  cfg: ToleranceConfig = DEFAULT_CONFIG) -> tuple[float, dict, bool]:
    """Signed excess of the claimed-but-false inequality's left side.

    claim "sfirst_middle": rho^{1/2}((A o A)(B o B)) vs rho^{1/2}(AB o BA);
    claim "jordan_naive": ||A o B o A|| vs ||A B A|| (l2 norms).
    Positive gap = the alleged inequality fails on (a, b).
    """
    if claim == "sfirst_middle":
        lhs_m = matmul_chain([hadamard_product_chain([a, a]), hadamard_product_chain([b, b])])
        rhs_m = hadamard_product_chain([matmul_chain([a, b]), matmul_chain([b, a])])
        x = spectral_radius(lhs_m, cfg)
        y = spectral_radius(rhs_m, cfg)
        lhs, rhs = math.sqrt(x.value), math.sqrt(y.value)
        values = {"rho^{1/2}((A o A)(B o B))": lhs, "rho^{1/2}(AB o BA)": rhs}
        return lhs - rhs, values, x.converged and y.converged
    if claim == "jordan_naive":
        x = operator_norm(hadamard_product_chain([a, b, a]), 2, cfg)
        y = operator_norm(matmul_chain([a, b, a]), 2, cfg)
        values = {"||A o B o A||": x.value, "||A B A||": y.value}
        return x.value - y.value, values, x.converged and y.converged
    raise DomainError(f"unknown claim {claim!r}; use sfirst_middle or jordan_naive")


_CLAIM_KINDS = {"sfirst_middle": "sfirst_violation", "jordan_naive": "jordan_naive_violation"}


def search_violation(claim: str, cfg: SearchConfig,
                     tol_cfg: ToleranceConfig = DEFAULT_CONFIG) -> Finding | Exhausted:
    """Random search for a witness violating one of the false claims."""
    if claim not in _CLAIM_KINDS:
        raise DomainError(f"unknown claim {claim!r}; use sfirst_middle or jordan_naive")
    for trial in range(cfg.trials):
        stream = SplitMix64(trial_seed(cfg.seed, trial))
        n = stream.randint(*cfg.n_range)
        seed_a = stream.next_raw()
        seed_b = stream.next_raw()
        a = random_matrix(n, cfg.density, seed_a)
        b = random_matrix(n, cfg.density, seed_b)
        gap, values, converged = violation_gap(claim, a, b, tol_cfg)
        rhs = min(values.values())
        if converged and gap > max(cfg.target_gap, _violation_floor(rhs, tol_cfg)):
            return Finding(
                kind=_CLAIM_KINDS[claim],
                matrices=(a, b),
                values=values,
                gap=gap,
                seed_trail={"seed": cfg.seed, "trial": trial, "n": n, "density": cfg.density,
                            "seed_a": seed_a, "seed_b": seed_b, "claim": claim},
            )
    return Exhausted(claim, cfg.trials, cfg.seed)


# -- per-chain instance sampling ----------------------------------------------

_FIXED_ARITY = {ChainId.AUDENAERT: 2, ChainId.HORN_ZHANG: 2, ChainId.SCHEP_CORRECTED: 2,
                ChainId.PEPERKO_MIX: 2, ChainId.TWO_MATRIX_T: 2, ChainId.ATB: 2,
                ChainId.JORDAN: 2, ChainId.ABTC: 3}


def sample_instance(chain, stream: SplitMix64, n_range: tuple[int, int] = (1, 6),
                    density: float = 1.0, max_m: int = 5,
                    tol_cfg: ToleranceConfig = DEFAULT_CONFIG):
    """Draw a random (matrices, params) pair satisfying the chain's contract."""
    cid = ChainId(chain) if not isinstance(chain, ChainId) else chain
    n = stream.randint(*n_range)
    if cid in _FIXED_ARITY:
        m = _FIXED_ARITY[cid]
    elif cid is ChainId.CHEN_ZHANG:
        m = stream.randint(2, max(2, max_m))
    else:
        m = stream.randint(1, max_m)

    def draw(count):
        return [random_matrix(n, density, stream.next_raw()) for _ in range(count)]

    params: dict = {}
    if cid in (ChainId.DP_GRID_RHO, ChainId.DP_GRID_NORM, ChainId.DP_GRID_LE, ChainId.NUMRAD_GRID):
        k = stream.randint(1, 3)
        m = stream.randint(1, 3)
        mats = draw(k * m)
        alphas = [0.1 + stream.uniform() for _ in range(m)]
        total = sum(alphas)
        if cid is ChainId.NUMRAD_GRID:
            alphas = [a / total for a in alphas]
        else:
            target = 1.0 + stream.uniform()
            alphas = [a * target / total for a in alphas]
        params = {"alphas": alphas, "k": k}
        return mats, params

    mats = draw(m)
    if cid in (ChainId.WEIGHTED_MEAN_RHO, ChainId.WEIGHTED_MEAN_NORM, ChainId.NUMRAD_WEIGHTED):
        alphas = [0.1 + stream.uniform() for _ in range(m)]
        total = sum(alphas)
        if cid is ChainId.NUMRAD_WEIGHTED:
            alphas = [a / total for a in alphas]
        else:
            target = 1.0 + stream.uniform()
            alphas = [a * target / total for a in alphas]
        params["alphas"] = alphas
    if cid in (ChainId.HPOW_RHO, ChainId.HPOW_NORM, ChainId.HPOW_LE):
        params["t"] = 1.0 + 3.0 * stream.uniform()
    if cid in (ChainId.GENP1_RHO, ChainId.GENP1_NORM, ChainId.CHEN_ZHANG, ChainId.GRAM):
        params["t"] = 1.0 + (m - 1) * stream.uniform()
    if cid is ChainId.TWO_MATRIX_T:
        variant = ("rho", "norm", "numrad")[stream.randint(0, 2)]
        params["variant"] = variant
        params["t"] = 2.0 if variant == "numrad" else 1.0 + stream.uniform()
    if cid in (ChainId.WEIGHTED_MEAN_NORM, ChainId.HPOW_NORM, ChainId.GENP1_NORM):
        params["p"] = (1, 2, math.inf)[stream.randint(0, 2)]
    if cid is ChainId.SPECTRAL_MAP_RESOLVENT:
        params["lambda"] = spectral_radius(matmul_chain(mats), tol_cfg).value + 1.0
    if cid is ChainId.POWER_SERIES:
        params["coeffs"] = [stream.uniform() for _ in range(stream.randint(1, 4))]
    return mats, params


@dataclass(frozen=True)
class TightnessStats:
    """Slack distribution of one chain over random instances."""

    chain: str
    trials: int
    inconclusive: int
    min_slack_min: float
    min_slack_median: float
    min_slack_max: float
    extremal: Finding | None

    def to_json_dict(self) -> dict:
        return {
            "chain": self.chain,
            "trials": self.trials,
            "inconclusive": self.inconclusive,
            "min_slack_min": self.min_slack_min,
            "min_slack_median": self.min_slack_median,
            "min_slack_max": self.min_slack_max,
            "extremal": self.extremal.to_json_dict() if self.extremal else None,
        }


def tightness_stats(chain, cfg: SearchConfig,
                    tol_cfg: ToleranceConfig = DEFAULT_CONFIG) -> TightnessStats:
    """min/median/max of min_slack over cfg.trials random instances; the
    extremal (tightest) instance is persisted as a Finding."""
    cid = ChainId(chain) if not isinstance(chain, ChainId) else chain
    slacks: list[float] = []
    inconclusive = 0
    extremal: Finding | None = None
    for trial in range(cfg.trials):
        stream = SplitMix64(trial_seed(cfg.seed, trial))
        mats, params = sample_instance(cid, stream, cfg.n_range, cfg.density, tol_cfg=tol_cfg)
        report = evaluate_chain(cid, mats, params, tol_cfg)
        if report.inconclusive:
            inconclusive += 1
            continue
        slacks.append(report.min_slack)
        if extremal is None or report.min_slack < extremal.gap:
            extremal = Finding(
                kind="extremal_slack",
                matrices=tuple(mats),
                values={t.label: t.value for t in report.terms},
                gap=report.min_slack,
                seed_trail={"seed": cfg.seed, "trial": trial, "chain": cid.value,
                            "params": report.params, "density": cfg.density},
            )
    if not slacks:
        return TightnessStats(cid.value, cfg.trials, inconclusive,
                              math.nan, math.nan, math.nan, None)
    return TightnessStats(
        chain=cid.value,
        trials=cfg.trials,
        inconclusive=inconclusive,
        min_slack_min=min(slacks),
        min_slack_median=float(statistics.median(slacks)),
        min_slack_max=max(slacks),
        extremal=extremal,
    )


# -- re-verification and persistence -------------------------------------------

def verify_finding(finding: Finding, tol_cfg: ToleranceConfig = DEFAULT_CONFIG,
                   rel_tol: float = 1e-9) -> tuple[bool, dict]:
    """Recompute a finding's values from its matrices; True when every labeled
    value reproduces within rel_tol relative."""
    if finding.kind == "inequivalence":
        _, values, _ = inequivalence_gap(*finding.matrices, tol_cfg)
    elif finding.kind == "sfirst_violation":
        _, values, _ = violation_gap("sfirst_middle", *finding.matrices, tol_cfg)
    elif finding.kind == "jordan_naive_violation":
        _, values, _ = violation_gap("jordan_naive", *finding.matrices, tol_cfg)
    elif finding.kind == "extremal_slack":
        trail = finding.seed_trail
        try:
            report = evaluate_chain(trail["chain"], list(finding.matrices), trail.get("params"), tol_cfg)
        except (ContractError, KeyError) as exc:
            raise DomainError(f"extremal finding is not re-evaluable: {exc}") from exc
        values = {t.label: t.value for t in report.terms}
    else:
        raise DomainError(f"unknown finding kind {finding.kind!r}")
    ok = set(values) == set(finding.values) and all(
        abs(values[k] - finding.values[k]) <= rel_tol * max(1.0, abs(finding.values[k]))
        for k in values
    )
    return ok, values


def save_findings(path, findings: Sequence[Finding | Exhausted]) -> None:
    """Append findings (or exhausted records) to a JSON-lines corpus."""
    from .serialize import dumps_compact

    with Path(path).open("a", encoding="utf-8") as fh:
        for item in findings:
            fh.write(dumps_compact(item.to_json_dict()) + "\n")


def load_findings(path) -> list[Finding]:
    """Read every Finding from a JSON-lines corpus (exhausted records are kept
    as plain dicts by callers that need them; here they are skipped)."""
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj.get("exhausted"):
                continue
            out.append(Finding.from_json_dict(obj))
    return out
