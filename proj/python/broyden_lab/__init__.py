"""Convex Broyden class quasi-Newton updates with convergence-envelope checks."""

from ._core import (
    ConfigError,
    DivergenceError,
    NotSpdError,
    augmented_barrier,
    broyd,
    env_quad_linear,
    env_quad_superlinear,
    k0,
    logdet_barrier,
    nu,
    region_radius,
    rel_eigen_range,
    run_config,
    solve,
    verify,
)

__all__ = [
    "ConfigError",
    "DivergenceError",
    "NotSpdError",
    "augmented_barrier",
    "broyd",
    "env_quad_linear",
    "env_quad_superlinear",
    "k0",
    "logdet_barrier",
    "nu",
    "region_radius",
    "rel_eigen_range",
    "run_config",
    "solve",
    "verify",
]
