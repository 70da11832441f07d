"""Nonparametric instrumental-variables regression."""

from ._core import (
    Design,
    DomainError,
    InputError,
    NumericalError,
    ParameterError,
    decay_exponent,
    default_eval_points,
    ecdf_transform,
    estimate_kernel,
    estimate_series,
    estimation_band,
    rate_study,
    simulate,
    spectrum_data,
    spectrum_design,
)

__all__ = [
    "Design",
    "DomainError",
    "InputError",
    "NumericalError",
    "ParameterError",
    "decay_exponent",
    "default_eval_points",
    "ecdf_transform",
    "estimate_kernel",
    "estimate_series",
    "estimation_band",
    "rate_study",
    "simulate",
    "spectrum_data",
    "spectrum_design",
]
