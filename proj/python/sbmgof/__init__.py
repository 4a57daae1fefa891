"""Goodness-of-fit tests for stochastic block models.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._core import (
    Graph,
    critical_value,
    default_b,
    estimate_q,
    fit_gumbel,
    generate_sbm,
    gumbel_cdf,
    load_edge_list,
    load_membership,
    p_value,
    save_edge_list,
    simulate,
    spectral_membership,
    test_g,
    test_k,
)

__all__ = [
    "Graph",
    "critical_value",
    "default_b",
    "estimate_q",
    "fit_gumbel",
    "generate_sbm",
    "gumbel_cdf",
    "load_edge_list",
    "load_membership",
    "p_value",
    "save_edge_list",
    "simulate",
    "spectral_membership",
    "test_g",
    "test_k",
]
