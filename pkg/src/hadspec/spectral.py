"""Scalar functionals of non-negative matrices.

Spectral radius, l^p operator norms, numerical radius, max-times (cycle
geometric mean) eigenvalue, matrix exponential and resolvent.  Each
iterative routine reports its convergence state instead of guessing, and
an independent fixed-step Gelfand oracle plus a closed-form
characteristic-polynomial oracle (n <= 4) are provided for cross-checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .nnmatrix import DomainError, NonNegativeMatrix, ShapeError

METHOD_GELFAND = "gelfand"
METHOD_POWER = "power_iteration"
METHOD_CLOSED_FORM = "closed_form"
METHOD_KARP = "karp"
METHOD_ORACLE = "oracle"


class SpectralConstraintError(ValueError):
    """A parameter violates a spectral-radius precondition (e.g. resolvent lambda)."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Convergence budgets shared by the iterative routines."""

    rel_tol: float = 1e-10
    max_power_iters: int = 10000
    max_squarings: int = 60

    def __post_init__(self) -> None:
        if self.rel_tol <= 0.0:
            raise DomainError("rel_tol must be > 0")
        if self.max_power_iters < 1 or self.max_squarings < 1:
            raise DomainError("iteration budgets must be positive")


DEFAULT_CONFIG = ToleranceConfig()


@dataclass(frozen=True)
class SpectralEstimate:
    """A computed scalar functional with convergence metadata."""

    value: float
    iterations: int
    residual: float
    converged: bool
    method: str

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "method": self.method,
        }


def _require_square(a: NonNegativeMatrix, op: str) -> None:
    if not a.is_square():
        raise ShapeError(f"{op}: matrix must be square, got {a.shape}")


def _row_sum_norm(arr: np.ndarray) -> float:
    return float(np.max(np.sum(arr, axis=1)))


# ---------------------------------------------------------------------------
# Spectral radius via the Gelfand sequence ||A^(2^k)||^(1/2^k)
# ---------------------------------------------------------------------------

def _gelfand(arr: np.ndarray, cfg: ToleranceConfig) -> tuple[float, int, float, bool]:
    """Gelfand squaring core on a raw array: (value, squarings, residual, converged)."""
    s = _row_sum_norm(arr)
    if s == 0.0:
        return 0.0, 0, 0.0, True
    b = arr / s
    log_scale = math.log(s)
    estimate = math.exp(log_scale)
    residual = math.inf
    for k in range(1, cfg.max_squarings + 1):
        b = b @ b
        s = _row_sum_norm(b)
        if s == 0.0:
            # some power of the input vanished: nilpotent, rho is exactly 0
            return 0.0, k, 0.0, True
        b = b / s
        log_scale = 2.0 * log_scale + math.log(s)
        new_estimate = math.exp(log_scale / 2.0 ** k)
        # purely relative stop: fractional powers of the result (rho^{1/t} terms)
        # keep relative accuracy but would amplify a merely-absolute one
        residual = abs(new_estimate - estimate) / new_estimate
        estimate = new_estimate
        if residual <= cfg.rel_tol:
            return estimate, k, residual, True
    return estimate, cfg.max_squarings, residual, False


def spectral_radius(a: NonNegativeMatrix, cfg: ToleranceConfig = DEFAULT_CONFIG) -> SpectralEstimate:
    """Spectral radius by repeated squaring with per-step rescaling.

    The max-row-sum norm of the running power is folded into a log-scale
    accumulator, so reducible, periodic and nilpotent inputs all converge
    and powers far outside double range are handled.  The iterate sequence
    is non-increasing and bounded below by rho(a).
    """
    _require_square(a, "spectral_radius")
    value, iters, residual, converged = _gelfand(a.to_array(), cfg)
    return SpectralEstimate(value, iters, residual, converged, METHOD_GELFAND)


def spectral_radius_oracle(a: NonNegativeMatrix, k: int) -> float:
    """Fixed k-step Gelfand iterate ||a^(2^k)||_inf ** (1/2^k).

    Plain straight-line recurrence, independent of the adaptive stopping
    logic in :func:`spectral_radius`; intended for cross-checks.
    """
    _require_square(a, "spectral_radius_oracle")
    if not 0 <= k <= 60:
        raise DomainError(f"oracle step count must lie in [0, 60], got {k}")
    arr = a.to_array()
    s = _row_sum_norm(arr)
    if s == 0.0:
        return 0.0
    b = arr / s
    log_scale = math.log(s)
    for _ in range(k):
        b = b @ b
        s = _row_sum_norm(b)
        if s == 0.0:
            return 0.0
        b = b / s
        log_scale = 2.0 * log_scale + math.log(s)
    return math.exp(log_scale / 2.0 ** k)


# ---------------------------------------------------------------------------
# Characteristic-polynomial oracle, n <= 4
# ---------------------------------------------------------------------------

def _charpoly_coeffs(arr: np.ndarray) -> list[float]:
    """Monic characteristic polynomial coefficients [1, c1, ..., cn]
    via the Faddeev-LeVerrier recurrence."""
    n = arr.shape[0]
    coeffs = [1.0]
    m = arr.copy()
    for k in range(1, n + 1):
        c = -np.trace(m) / k
        coeffs.append(float(c))
        if k < n:
            m = arr @ (m + c * np.eye(n))
    return coeffs


def _poly_eval(coeffs: list[float], z: complex) -> tuple[complex, complex]:
    """Horner evaluation of p(z) and p'(z) for monic coefficient list."""
    p = complex(coeffs[0])
    dp = 0j
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _newton_polish(coeffs: list[float], roots: list[complex], steps: int = 4) -> list[complex]:
    polished = []
    for z in roots:
        for _ in range(steps):
            p, dp = _poly_eval(coeffs, z)
            if p == 0 or abs(dp) == 0.0:
                break
            z = z - p / dp
        polished.append(z)
    return polished


def _roots_quadratic(b: float, c: float) -> list[complex]:
    s = cmath.sqrt(complex(b * b - 4.0 * c))
    return [(-b + s) / 2.0, (-b - s) / 2.0]


def _roots_cubic(a: float, b: float, c: float) -> list[complex]:
    # depressed form y^3 + p y + q with z = y - a/3
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    shift = a / 3.0
    d = cmath.sqrt(complex(q * q / 4.0 + p ** 3 / 27.0))
    # pick the larger-magnitude cube-root argument to avoid cancellation
    u3 = -q / 2.0 + d
    if abs(-q / 2.0 - d) > abs(u3):
        u3 = -q / 2.0 - d
    if u3 == 0:
        return [-shift] * 3
    u = u3 ** (1.0 / 3.0)
    omega = complex(-0.5, math.sqrt(3.0) / 2.0)
    roots = []
    for k in range(3):
        uk = u * omega ** k
        roots.append(uk - p / (3.0 * uk) - shift)
    return roots


def _roots_quartic(a: float, b: float, c: float, d: float) -> list[complex]:
    # depressed form y^4 + p y^2 + q y + r with z = y - a/4
    p = b - 3.0 * a * a / 8.0
    q = c - a * b / 2.0 + a ** 3 / 8.0
    r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a ** 4 / 256.0
    shift = a / 4.0
    if abs(q) < 1e-14 * (1.0 + abs(p) + abs(r)):
        # biquadratic: y^2 solves w^2 + p w + r
        ys = []
        for w in _roots_quadratic(p, r):
            s = cmath.sqrt(w)
            ys.extend([s, -s])
        return [y - shift for y in ys]
    # Ferrari: resolvent cubic m^3 + p m^2 + (p^2/4 - r) m - q^2/8, then
    # y^4 + p y^2 + q y + r = (y^2 + s y + (p/2 + m - q/(2s))) (y^2 - s y + (p/2 + m + q/(2s)))
    # with s = sqrt(2m); q != 0 here keeps every resolvent root away from 0.
    resolvent = _roots_cubic(p, p * p / 4.0 - r, -q * q / 8.0)
    m = max(resolvent, key=abs)
    s = cmath.sqrt(2.0 * m)
    roots = []
    for sign in (1.0, -1.0):
        bb = sign * s
        cc = p / 2.0 + m - sign * q / (2.0 * s)
        disc = cmath.sqrt(bb * bb - 4.0 * cc)
        roots.extend([(-bb + disc) / 2.0, (-bb - disc) / 2.0])
    return [y - shift for y in roots]


def charpoly_radius(a: NonNegativeMatrix) -> float:
    """Spectral radius from closed-form characteristic-polynomial roots.

    Only n <= 4 (quartic formula); each root is Newton-polished.  Serves
    as an oracle fully independent of the Gelfand squaring path.
    """
    _require_square(a, "charpoly_radius")
    n = a.rows
    if n > 4:
        raise DomainError(f"characteristic-polynomial oracle supports n <= 4, got {n}")
    coeffs = _charpoly_coeffs(a.to_array())
    if n == 1:
        roots: list[complex] = [complex(-coeffs[1])]
    elif n == 2:
        roots = _roots_quadratic(coeffs[1], coeffs[2])
    elif n == 3:
        roots = _roots_cubic(coeffs[1], coeffs[2], coeffs[3])
    else:
        roots = _roots_quartic(coeffs[1], coeffs[2], coeffs[3], coeffs[4])
    roots = _newton_polish(coeffs, roots)
    return max(abs(z) for z in roots)


# ---------------------------------------------------------------------------
# Operator norms and numerical radius
# ---------------------------------------------------------------------------

def _power_symmetric(s_arr: np.ndarray, cfg: ToleranceConfig) -> tuple[float, int, float, bool, str]:
    """Largest eigenvalue of a symmetric non-negative matrix.

    Power iteration from the all-ones direction, which always overlaps the
    Perron eigenvector, so iterates converge toward lambda_max; stops after
    two consecutive Rayleigh-quotient changes below rel_tol.  When the top
    eigenvalues cluster the linear rate stalls, so an exhausted budget falls
    back to Gelfand squaring (valid since lambda_max = rho here), whose rate
    does not depend on the spectral gap.
    """
    n = s_arr.shape[0]
    if not np.any(s_arr):
        return 0.0, 0, 0.0, True, METHOD_POWER
    x = np.ones(n) / math.sqrt(n)
    y = s_arr @ x
    theta = float(x @ y)
    residual = math.inf
    small_steps = 0
    for it in range(1, cfg.max_power_iters + 1):
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return 0.0, it, 0.0, True, METHOD_POWER
        x = y / ny
        y = s_arr @ x
        new_theta = float(x @ y)
        residual = abs(new_theta - theta) / (new_theta if new_theta > 0.0 else 1.0)
        theta = new_theta
        if residual <= cfg.rel_tol:
            small_steps += 1
            if small_steps >= 2:
                return theta, it, residual, True, METHOD_POWER
        else:
            small_steps = 0
    value, iters, residual, converged = _gelfand(s_arr, cfg)
    return value, cfg.max_power_iters + iters, residual, converged, METHOD_GELFAND


def operator_norm(a: NonNegativeMatrix, p, cfg: ToleranceConfig = DEFAULT_CONFIG) -> SpectralEstimate:
    """Operator norm of `a` acting on l^p, for p in {1, 2, inf}.

    p=1 and p=inf are the exact column/row sum maxima; p=2 is
    sqrt(lambda_max(A^T A)) by symmetric power iteration.
    """
    arr = a.to_array()
    if p == 1:
        return SpectralEstimate(float(np.max(np.sum(arr, axis=0))), 0, 0.0, True, METHOD_CLOSED_FORM)
    if p == math.inf or p == "inf":
        return SpectralEstimate(_row_sum_norm(arr), 0, 0.0, True, METHOD_CLOSED_FORM)
    if p == 2:
        gram = arr.T @ arr
        theta, iters, residual, converged, method = _power_symmetric(gram, cfg)
        return SpectralEstimate(math.sqrt(max(theta, 0.0)), iters, residual, converged, method)
    raise DomainError(f"operator norm defined for p in {{1, 2, inf}}, got {p!r}")


def numerical_radius(a: NonNegativeMatrix, cfg: ToleranceConfig = DEFAULT_CONFIG) -> SpectralEstimate:
    """Numerical radius of an entrywise non-negative matrix.

    For such matrices the supremum of <Af, f> over unit vectors is attained
    on non-negative f and equals lambda_max((A + A^T)/2).  The symmetric
    part is shifted by c = ||S||_inf + 1 so its dominant eigenvalue is
    lambda_max(S) + c even when S has eigenvalue -lambda_max(S).
    """
    _require_square(a, "numerical_radius")
    arr = a.to_array()
    sym = (arr + arr.T) / 2.0
    shift = _row_sum_norm(sym) + 1.0
    # the iteration tracks lambda_max(S) + shift, and shift <= (n+1) w(a) + 1,
    # so tighten the tolerance to keep the error at rel_tol * max(1, w(a))
    eff = replace(cfg, rel_tol=cfg.rel_tol / (a.rows + 2))
    theta, iters, residual, converged, method = _power_symmetric(sym + shift * np.eye(a.rows), eff)
    return SpectralEstimate(max(theta - shift, 0.0), iters, residual, converged, method)


# ---------------------------------------------------------------------------
# Max-times eigenvalue (Karp's cycle-mean algorithm on logs)
# ---------------------------------------------------------------------------

def max_times_radius(a: NonNegativeMatrix) -> SpectralEstimate:
    """Largest geometric cycle mean mu(a) = max over cycles of (prod entries)^(1/len).

    Karp's maximum-cycle-mean formula applied to log entries, with -inf as
    the sentinel for zero entries and a virtual zero-weight source (walks
    may start anywhere).  A matrix with no positive-weight cycle gives 0.
    """
    _require_square(a, "max_times_radius")
    n = a.rows
    with np.errstate(divide="ignore"):
        w = np.log(a.to_array())
    d = np.full((n + 1, n), -math.inf)
    d[0, :] = 0.0
    for k in range(1, n + 1):
        d[k] = np.max(d[k - 1][:, None] + w, axis=0)
    reachable = d[n] > -math.inf
    if not np.any(reachable):
        return SpectralEstimate(0.0, n, 0.0, True, METHOD_KARP)
    num = d[n, reachable][None, :] - d[:n, reachable]  # +inf where no k-walk exists
    den = (n - np.arange(n))[:, None].astype(float)
    ratios = num / den
    mu_log = float(np.max(np.min(ratios, axis=0)))
    return SpectralEstimate(math.exp(mu_log), n, 0.0, True, METHOD_KARP)


# ---------------------------------------------------------------------------
# Spectral-mapping helpers: exponential and resolvent
# ---------------------------------------------------------------------------

def matrix_exp(a: NonNegativeMatrix, cfg: ToleranceConfig = DEFAULT_CONFIG) -> NonNegativeMatrix:
    """exp(a) by scaling-and-squaring around a truncated Taylor core.

    The scaled matrix has row-sum norm <= 1/2, so the series tail after the
    stopping term is below one unit of roundoff relative to the partial sum;
    every term is non-negative, hence the result dominates the identity.
    """
    _require_square(a, "matrix_exp")
    arr = a.to_array()
    n = a.rows
    norm = _row_sum_norm(arr)
    if norm > 0.5 * 2.0 ** cfg.max_squarings:
        raise OverflowError("matrix exponential exceeds the double-precision range")
    squarings = 0 if norm == 0.0 else max(0, int(math.ceil(math.log2(norm / 0.5))))
    b = arr / 2.0 ** squarings
    total = np.eye(n)
    term = np.eye(n)
    tiny = 2.0 ** -53
    for j in range(1, 60):
        term = term @ b / j
        total = total + term
        if np.max(term) <= tiny * max(1.0, float(np.max(total))):
            break
    with np.errstate(over="ignore"):
        for _ in range(squarings):
            total = total @ total
            if not np.all(np.isfinite(total)):
                raise OverflowError("matrix exponential exceeds the double-precision range")
    return NonNegativeMatrix(total)


def resolvent(a: NonNegativeMatrix, lam: float, cfg: ToleranceConfig = DEFAULT_CONFIG) -> NonNegativeMatrix:
    """(lam*I - a)^{-1} for lam strictly above the spectral radius.

    The precondition is enforced against the computed radius estimate plus
    its tolerance margin, not trusted from the caller.  The inverse is the
    sum of the Neumann series of a non-negative matrix, so tiny negative
    round-off (below 1e-12 of the result scale) is clamped to zero.
    """
    _require_square(a, "resolvent")
    rho = spectral_radius(a, cfg)
    margin = cfg.rel_tol * max(1.0, rho.value)
    if not lam > rho.value + margin:
        raise SpectralConstraintError(
            f"resolvent requires lambda > rho(a) ~= {rho.value}; got lambda = {lam}"
        )
    n = a.rows
    m = lam * np.eye(n) - a.to_array()
    try:
        inv = np.linalg.solve(m, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"resolvent elimination failed: {exc}") from exc
    floor = -1e-12 * max(1.0, float(np.max(np.abs(inv))))
    if np.any(inv < floor):
        raise ArithmeticError("resolvent produced substantially negative entries")
    return NonNegativeMatrix(np.where(inv < 0.0, 0.0, inv))
