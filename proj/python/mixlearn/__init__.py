"""Mixture density estimation: base-learner lifting and tournament selection.

The heavy lifting lives in the compiled extension ``mixlearn._core``;
this package re-exports its functions. Densities cross the boundary as
JSON documents (see the README for the schema), points as nested lists.
"""

from ._core import (
    MixlearnError,
    build_weight_cover,
    chernoff_half_bound,
    l1_monte_carlo,
    l1_quadrature,
    learn_mixture,
    mixture_sample_size,
    negligible_threshold,
    pdf,
    project_residuals,
    roundtrip,
    sample,
    select,
    selection_sample_size,
)

__all__ = [
    "MixlearnError",
    "build_weight_cover",
    "chernoff_half_bound",
    "l1_monte_carlo",
    "l1_quadrature",
    "learn_mixture",
    "mixture_sample_size",
    "negligible_threshold",
    "pdf",
    "project_residuals",
    "roundtrip",
    "sample",
    "select",
    "selection_sample_size",
]

__version__ = "0.1.0"
