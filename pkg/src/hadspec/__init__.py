"""Spectral-radius, operator-norm and numerical-radius inequality checks for
Hadamard products of non-negative matrices and discretized kernel operators.

All values are immutable and every operation is a pure function, so the
whole API is safe to call concurrently.
"""

from .nnmatrix import (
    DomainError,
    NonNegativeMatrix,
    ShapeError,
    WeightVector,
    block_cyclic,
    cyclic_products,
    elementwise_le,
    hadamard_power,
    hadamard_product,
    hadamard_product_chain,
    hadamard_weighted_geomean,
    le_margin,
    matmul,
    matmul_chain,
)
from .spectral import (
    DEFAULT_CONFIG,
    SpectralConstraintError,
    SpectralEstimate,
    ToleranceConfig,
    charpoly_radius,
    matrix_exp,
    max_times_radius,
    numerical_radius,
    operator_norm,
    resolvent,
    spectral_radius,
    spectral_radius_oracle,
)
from .chains import (
    ChainId,
    ChainReport,
    ChainTerm,
    ContractError,
    MonotoneReport,
    catalog_ids,
    evaluate_chain,
    scan_monotone,
    scan_numrad,
    verify_dp_grid,
)
from .kernelgrid import (
    EntryFormula,
    FormulaDomainError,
    FormulaSyntaxError,
    KernelSpec,
    TruncatedMatrixSpec,
    discretize,
    kernel_geomean_check,
    parse_entry_expr,
    truncation_sequence,
)
from .explorer import (
    Exhausted,
    Finding,
    JORDAN_NAIVE_WITNESS,
    SearchConfig,
    SplitMix64,
    TightnessStats,
    inequivalence_gap,
    load_findings,
    random_matrix,
    sample_instance,
    save_findings,
    search_inequivalence,
    search_violation,
    tightness_stats,
    verify_finding,
    violation_gap,
)

__version__ = "0.1.0"
