"""Principal-series matrix elements, cocycle, kernels and spectral weights."""

from ._core import (
    DomainError,
    PoleError,
    UnsupportedCase,
    a_element,
    b_component,
    b_component_integral,
    bound_state_bracket_limit,
    bound_state_bracket_sum,
    clebsch_gordan,
    decomposition_weight,
    f0_series,
    kappa_closed_l1,
    kernel_boost,
    kweight,
    laurent_coefficient,
    legendre_p,
    norm_b_squared,
    norm_b_squared_closed,
    projection,
    run_suite,
    suite_names,
    umat,
    umat_quadrature,
)

__all__ = [
    "DomainError",
    "PoleError",
    "UnsupportedCase",
    "a_element",
    "b_component",
    "b_component_integral",
    "bound_state_bracket_limit",
    "bound_state_bracket_sum",
    "clebsch_gordan",
    "decomposition_weight",
    "f0_series",
    "kappa_closed_l1",
    "kernel_boost",
    "kweight",
    "laurent_coefficient",
    "legendre_p",
    "norm_b_squared",
    "norm_b_squared_closed",
    "projection",
    "run_suite",
    "suite_names",
    "umat",
    "umat_quadrature",
]
