"""Partition-based random fields: simulation, renewal weights, limit sampling."""

from ._core import (
    ConfigError,
    __version__,
    c_alpha,
    exact_variance,
    expected_occupancy,
    forest_truncation_bound,
    hs_exact_variance,
    ks_normal,
    pmf,
    renewal_q,
    sample_fbs,
    simulate,
    sum_q_sq,
    verify,
    weights,
)

__all__ = [
    "ConfigError",
    "__version__",
    "c_alpha",
    "exact_variance",
    "expected_occupancy",
    "forest_truncation_bound",
    "hs_exact_variance",
    "ks_normal",
    "pmf",
    "renewal_q",
    "sample_fbs",
    "simulate",
    "sum_q_sq",
    "verify",
    "weights",
]
