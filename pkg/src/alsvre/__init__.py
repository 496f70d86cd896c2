"""Variance-reduced extragradient solvers for finite-sum convex-concave minimax problems."""
from .core import (GradientPair, NumericalError, Oracle, PrimalDualPoint, ProblemConstants,
                   UsageError, estimate_average_smoothness, gradient_operator, make_rng,
                   spawn_seeds, stochastic_gradient_operator)

__version__ = "0.1.0"

__all__ = [
    "GradientPair", "NumericalError", "Oracle", "PrimalDualPoint", "ProblemConstants", "UsageError",
    "estimate_average_smoothness", "gradient_operator", "make_rng", "spawn_seeds",
    "stochastic_gradient_operator",
]
