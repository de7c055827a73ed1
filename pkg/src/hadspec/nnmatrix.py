"""Value-semantic algebra of dense non-negative matrices.

Everything downstream (spectral functionals, inequality chains, searches)
operates on :class:`NonNegativeMatrix`.  Entries are validated once at
construction, so all operations in this module may assume finiteness and
non-negativity.  Hadamard powers use the convention ``0**0 == 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class DomainError(ValueError):
    """A value lies outside the domain an operation requires."""


class NonNegativeMatrix:
    """Dense rectangular matrix of finite reals >= 0, immutable after construction.

    Accepts anything ``numpy.asarray`` turns into a 2-d float array; data
    containing negatives, NaN or infinities is rejected.
    """

    __slots__ = ("_data",)

    def __init__(self, data) -> None:
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"matrix must have at least one row and column, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix entries must be finite (no NaN or infinity)")
        if np.any(arr < 0.0):
            i, j = np.argwhere(arr < 0.0)[0]
            raise DomainError(f"negative entry {arr[i, j]} at ({i}, {j})")
        arr = arr.copy()
        arr.flags.writeable = False
        self._data = arr

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    def to_array(self) -> np.ndarray:
        """Read-only ndarray view of the entries."""
        return self._data

    def transpose(self) -> "NonNegativeMatrix":
        return NonNegativeMatrix(self._data.T)

    @property
    def T(self) -> "NonNegativeMatrix":
        return self.transpose()

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, NonNegativeMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._data == other._data))

    def __repr__(self) -> str:
        return f"NonNegativeMatrix({self._data.tolist()!r})"

    # Shared JSON wire format: {"rows": n, "cols": m, "data": [[row...], ...]}

    def to_json_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": [list(row) for row in self._data]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "NonNegativeMatrix":
        try:
            rows, cols, data = obj["rows"], obj["cols"], obj["data"]
        except (TypeError, KeyError) as exc:
            raise DomainError(f"matrix JSON needs keys rows/cols/data: {exc}") from exc
        mat = cls(data)
        if mat.shape != (rows, cols):
            raise ShapeError(f"declared shape ({rows}, {cols}) does not match data shape {mat.shape}")
        return mat

    @classmethod
    def identity(cls, n: int) -> "NonNegativeMatrix":
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "NonNegativeMatrix":
        return cls(np.zeros((rows, cols if cols is not None else rows)))

    @classmethod
    def ones(cls, rows: int, cols: int | None = None) -> "NonNegativeMatrix":
        return cls(np.ones((rows, cols if cols is not None else rows)))


@dataclass(frozen=True)
class WeightVector:
    """Positive weights for Hadamard weighted geometric means.

    ``total`` caches the arithmetic sum of the weights; chain contracts
    compare it against 1 with slack 1e-12 so user fractions like three
    copies of 1/3 pass.
    """

    alphas: tuple[float, ...]
    total: float

    def __init__(self, alphas: Iterable[float]) -> None:
        alphas = tuple(float(a) for a in alphas)
        if not alphas:
            raise DomainError("weight vector must not be empty")
        for a in alphas:
            if not np.isfinite(a) or a <= 0.0:
                raise DomainError(f"weights must be finite and > 0, got {a}")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "total", float(sum(alphas)))

    def __len__(self) -> int:
        return len(self.alphas)


WEIGHT_SUM_SLACK = 1e-12


def _require_same_shape(a: NonNegativeMatrix, b: NonNegativeMatrix, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} differ")


def hadamard_product(a: NonNegativeMatrix, b: NonNegativeMatrix) -> NonNegativeMatrix:
    """Entrywise product of two equal-shape matrices."""
    _require_same_shape(a, b, "hadamard_product")
    return NonNegativeMatrix(a.to_array() * b.to_array())


def hadamard_power(a: NonNegativeMatrix, t: float) -> NonNegativeMatrix:
    """Entrywise power ``a_ij ** t`` for t >= 0, with ``0**0 == 1``."""
    t = float(t)
    if not np.isfinite(t) or t < 0.0:
        raise DomainError(f"Hadamard power exponent must be finite and >= 0, got {t}")
    # numpy already defines 0.0 ** 0.0 == 1.0, matching the required convention
    return NonNegativeMatrix(np.power(a.to_array(), t))


def matmul(a: NonNegativeMatrix, b: NonNegativeMatrix) -> NonNegativeMatrix:
    """Ordinary matrix product."""
    if a.cols != b.rows:
        raise ShapeError(f"matmul: inner dimensions {a.cols} and {b.rows} differ")
    return NonNegativeMatrix(a.to_array() @ b.to_array())


def matmul_chain(mats: Sequence[NonNegativeMatrix]) -> NonNegativeMatrix:
    """Left-to-right product ``mats[0] @ mats[1] @ ...`` (at least one operand)."""
    if not mats:
        raise DomainError("matmul_chain: empty operand list")
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m)
    return out


def hadamard_product_chain(mats: Sequence[NonNegativeMatrix]) -> NonNegativeMatrix:
    """Hadamard product of one or more equal-shape matrices."""
    if not mats:
        raise DomainError("hadamard_product_chain: empty operand list")
    out = mats[0]
    for m in mats[1:]:
        out = hadamard_product(out, m)
    return out


def hadamard_weighted_geomean(mats: Sequence[NonNegativeMatrix], w: WeightVector) -> NonNegativeMatrix:
    """Entrywise weighted geometric mean ``prod_k mats[k]_ij ** alpha_k``.

    Requires one weight per matrix and a weight sum of at least 1 (within
    1e-12); the 0**0 convention applies per factor.
    """
    if not mats:
        raise DomainError("hadamard_weighted_geomean: empty operand list")
    if len(mats) != len(w):
        raise ShapeError(f"{len(mats)} matrices but {len(w)} weights")
    if w.total < 1.0 - WEIGHT_SUM_SLACK:
        raise DomainError(f"weight sum must be >= 1, got {w.total}")
    shape = mats[0].shape
    for m in mats[1:]:
        _require_same_shape(mats[0], m, "hadamard_weighted_geomean")
    out = np.ones(shape)
    for m, alpha in zip(mats, w.alphas):
        out = out * np.power(m.to_array(), alpha)
    return NonNegativeMatrix(out)


def block_cyclic(mats: Sequence[NonNegativeMatrix]) -> NonNegativeMatrix:
    """Cyclic block embedding of m >= 2 square matrices of one size n.

    Returns the mn x mn matrix with ``mats[i]`` on the i-th superdiagonal
    block and ``mats[-1]`` in the bottom-left block.  Its m-th power is
    block-diagonal with the cyclic products as blocks, so the spectral
    radius of the embedding is the m-th root of rho(mats[0] ... mats[-1]).
    """
    m = len(mats)
    if m < 2:
        raise DomainError(f"block_cyclic needs at least 2 matrices, got {m}")
    n = mats[0].rows
    for a in mats:
        if not a.is_square() or a.rows != n:
            raise ShapeError("block_cyclic: all matrices must be square of one size")
    out = np.zeros((m * n, m * n))
    for i in range(m - 1):
        out[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = mats[i].to_array()
    out[(m - 1) * n:, :n] = mats[m - 1].to_array()
    return NonNegativeMatrix(out)


def cyclic_products(mats: Sequence[NonNegativeMatrix], t: float = 1.0) -> list[NonNegativeMatrix]:
    """All cyclic rotations of the product of Hadamard t-th powers.

    Element i is ``mats[i]^(t) mats[i+1]^(t) ... mats[i-1]^(t)`` (indices
    cyclic).  Requires square matrices of one size and 1 <= t <= len(mats).
    """
    m = len(mats)
    if m < 1:
        raise DomainError("cyclic_products: empty operand list")
    n = mats[0].rows
    for a in mats:
        if not a.is_square() or a.rows != n:
            raise ShapeError("cyclic_products: all matrices must be square of one size")
    t = float(t)
    if not 1.0 - 1e-12 <= t <= m + 1e-12:
        raise DomainError(f"cyclic_products: t must lie in [1, {m}], got {t}")
    powered = [hadamard_power(a, t) for a in mats]
    return [matmul_chain(powered[i:] + powered[:i]) for i in range(m)]


def elementwise_le(a: NonNegativeMatrix, b: NonNegativeMatrix, tol: float = 1e-9) -> bool:
    """Entrywise ``a_ij <= b_ij + tol * max(1, b_ij)``."""
    _require_same_shape(a, b, "elementwise_le")
    if tol < 0.0:
        raise DomainError(f"tolerance must be >= 0, got {tol}")
    bb = b.to_array()
    return bool(np.all(a.to_array() <= bb + tol * np.maximum(1.0, bb)))


def le_margin(a: NonNegativeMatrix, b: NonNegativeMatrix) -> float:
    """Worst signed violation of a <= b: ``max_ij (a_ij - b_ij) / max(1, b_ij)``.

    Negative or zero when the elementwise inequality holds; positive where
    it fails.  This is the scalar the elementwise chains report, and it is
    consistent with :func:`elementwise_le` at the same tolerance.
    """
    _require_same_shape(a, b, "le_margin")
    bb = b.to_array()
    return float(np.max((a.to_array() - bb) / np.maximum(1.0, bb)))
