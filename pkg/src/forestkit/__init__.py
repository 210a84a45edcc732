"""Exact combinatorics, moment computations, numerical bound checks and an
exact maximum-induced-forest solver for dense binomial random graphs."""

from forestkit.graph import (
    Graph,
    GnpParams,
    sample_gnp,
    induced_edge_count,
    component_count,
    is_induced_forest,
)
from forestkit.logreal import LogReal
from forestkit.forests import phi, g_exact, g_value, g_limit, g_sum_limit
from forestkit.moments import MomentQuery, concentration_points, expected_forest_count, ratio_and_bound
from forestkit.solver import SolveResult, brute_force_max, solve_max

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GnpParams",
    "sample_gnp",
    "induced_edge_count",
    "component_count",
    "is_induced_forest",
    "LogReal",
    "phi",
    "g_exact",
    "g_value",
    "g_limit",
    "g_sum_limit",
    "MomentQuery",
    "concentration_points",
    "expected_forest_count",
    "ratio_and_bound",
    "SolveResult",
    "brute_force_max",
    "solve_max",
]
