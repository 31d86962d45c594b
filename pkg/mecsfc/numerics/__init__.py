"""Numerical kernels used by the solvers

* `lambert_w0` principal branch of the Lambert W function
* `find_root` bracketed root finding
* `solve_knapsack` exact 0/1 knapsack with real-valued sizes
* `minimize_convex` log-barrier Newton method for small dense convex programs
"""
from ._lambertw import lambert_w0
from ._roots import find_root
from ._knapsack import KnapsackItem, solve_knapsack
from ._convex import ConvexProgram, ConvexSolution, KKTResiduals, minimize_convex

__all__ = [
    "lambert_w0",
    "find_root",
    "KnapsackItem",
    "solve_knapsack",
    "ConvexProgram",
    "ConvexSolution",
    "KKTResiduals",
    "minimize_convex",
]
