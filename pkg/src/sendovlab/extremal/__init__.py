"""Sendov objectives, enclosing disks, Kuhn–Tucker residuals and search drivers."""

from .disk import EnclosingDisk, circumradius, enclosing_disk
from .kkt import (
    HalfPlaneCert,
    KKTFit,
    KKTResidual,
    KKTState,
    conv_algebraic,
    conv_trigonometric,
    fit_multipliers,
    halfplane_cert,
    kkt_residual,
    lagrangian,
)
from .objective import SendovValue, centroid_weights, centroid_xi, sendov_S, sendov_S_ell
from .search import Finding, MonteCarloResult, SearchResult, local_search, monte_carlo, screen_S

__all__ = [
    "EnclosingDisk",
    "Finding",
    "HalfPlaneCert",
    "KKTFit",
    "KKTResidual",
    "KKTState",
    "MonteCarloResult",
    "SearchResult",
    "SendovValue",
    "centroid_weights",
    "centroid_xi",
    "circumradius",
    "conv_algebraic",
    "conv_trigonometric",
    "enclosing_disk",
    "fit_multipliers",
    "halfplane_cert",
    "kkt_residual",
    "lagrangian",
    "local_search",
    "monte_carlo",
    "screen_S",
    "sendov_S",
    "sendov_S_ell",
]
