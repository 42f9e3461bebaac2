"""Kernel-based Galerkin policy iteration."""

from ._kernel_pi import (
    Approximant,
    ConfigError,
    Kernel,
    KernelPiError,
    NonfiniteError,
    PeViolationError,
    SingularGramError,
    UnsupportedDerivativeError,
    __version__,
    benchmark_policy,
    benchmark_value,
    convergence_study,
    fill_distance,
    gauss_legendre,
    grid_centers,
    interpolate,
    kernel_property_suite,
    pi_decay_study,
    power_function,
    solve_benchmark,
    tensor_grid,
)

__all__ = [
    "Approximant",
    "ConfigError",
    "Kernel",
    "KernelPiError",
    "NonfiniteError",
    "PeViolationError",
    "SingularGramError",
    "UnsupportedDerivativeError",
    "__version__",
    "benchmark_policy",
    "benchmark_value",
    "convergence_study",
    "fill_distance",
    "gauss_legendre",
    "grid_centers",
    "interpolate",
    "kernel_property_suite",
    "pi_decay_study",
    "power_function",
    "solve_benchmark",
    "tensor_grid",
]
