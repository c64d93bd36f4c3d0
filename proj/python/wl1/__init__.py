"""Weighted l1 minimisation with partial support information.

Indices are 0-based throughout the Python API.
"""

from ._core import (
    BudgetExceeded,
    DomainError,
    ParameterError,
    UnsupportedGeometry,
    best_k_term,
    bracket_int,
    build_weights,
    construct_counterexample,
    cz_constants,
    demonstrate_failure,
    dirac_2k_threshold,
    emit_figures,
    exact_ric,
    figure_sweep,
    fmsy_constants,
    fmsy_threshold,
    gamma_factor,
    gaussian_noise_radius,
    mc_ric_lower_bound,
    minimal_t,
    optimality_certificate,
    ric_threshold,
    shifted_power_inequality,
    solve,
    sparse_decompose,
    sparsity_d,
    stability_constants_ds,
    stability_constants_l2,
    verify_decomposition,
)

__all__ = [name for name in dir() if not name.startswith("_")]
