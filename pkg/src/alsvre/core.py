"""Primal-dual points, gradient operators, SFO accounting and smoothness estimation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class UsageError(ValueError):
    """Invalid arguments supplied by the caller."""


class NumericalError(ArithmeticError):
    """A gradient or iterate stopped being finite."""


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator seeded through a SeedSequence, so runs are reproducible."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Derive ``count`` independent 64-bit seeds from one root seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


@dataclass(frozen=True)
class PrimalDualPoint:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if x.ndim != 1 or y.ndim != 1:
            raise UsageError("x and y must be vectors")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    @classmethod
    def from_flat(cls, z, dx: int) -> "PrimalDualPoint":
        z = np.asarray(z, dtype=float)
        return cls(z[:dx].copy(), z[dx:].copy())


@dataclass(frozen=True)
class GradientPair:
    """Stores ``(grad_x f, -grad_y f)``."""

    gx: np.ndarray
    gy_negated: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.gx, self.gy_negated])


def _as_flat(problem, z) -> np.ndarray:
    if isinstance(z, PrimalDualPoint):
        if z.x.size != problem.dx or z.y.size != problem.dy:
            raise UsageError(
                f"point has dims ({z.x.size}, {z.y.size}), problem expects "
                f"({problem.dx}, {problem.dy})")
        return z.z
    z = np.asarray(z, dtype=float)
    if z.shape != (problem.dim,):
        raise UsageError(f"point has shape {z.shape}, problem expects ({problem.dim},)")
    return z


def _check_finite(g: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(g)):
        raise NumericalError(f"non-finite value in {what}")
    return g


@dataclass
class Oracle:
    """Counts stochastic first-order oracle calls against one problem.

    One full gradient costs ``n`` calls, one component gradient costs 1.
    ``log`` (when enabled) receives every queried component index, which is
    what the zero-chain audit consumes.
    """

    problem: object
    calls: int = 0
    log: list | None = None

    def full(self, z: np.ndarray) -> np.ndarray:
        n = self.problem.n
        self.calls += n
        if self.log is not None:
            self.log.extend(range(n))
        return _check_finite(self.problem.operator(z), "full gradient")

    def component(self, i: int, z: np.ndarray) -> np.ndarray:
        self.calls += 1
        if self.log is not None:
            self.log.append(i)
        return _check_finite(self.problem.component_operator(i, z), f"gradient of component {i}")

    def component_diff(self, i: int, z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
        """``g_i(z1) - g_i(z2)``; two oracle calls."""
        self.calls += 2
        if self.log is not None:
            self.log.extend((i, i))
        return _check_finite(self.problem.component_operator_diff(i, z1, z2),
                             f"gradient of component {i}")


def gradient_operator(problem, z, oracle: Oracle | None = None) -> GradientPair:
    """``g(z) = (grad_x f(z), -grad_y f(z))`` for the mean objective."""
    flat = _as_flat(problem, z)
    oracle = oracle or Oracle(problem)
    g = oracle.full(flat)
    return GradientPair(g[:problem.dx], g[problem.dx:])


def stochastic_gradient_operator(problem, i: int, z, oracle: Oracle | None = None) -> GradientPair:
    """``g_i(z)`` for the 0-based component index ``i``."""
    if not 0 <= int(i) < problem.n:
        raise UsageError(f"component index {i} out of range [0, {problem.n})")
    flat = _as_flat(problem, z)
    oracle = oracle or Oracle(problem)
    g = oracle.component(int(i), flat)
    return GradientPair(g[:problem.dx], g[problem.dx:])


def _sample_point(problem, rng, radius):
    z = radius * rng.standard_normal(problem.dim)
    return problem.project(problem.center + z)


def estimate_average_smoothness(problem, num_pairs: int = 200, radius: float = 1.0,
                                seed=0) -> float:
    """Monte-Carlo lower estimate of the average-smoothness constant.

    Returns the largest sampled value of
    ``sqrt(mean_i ||g_i(z) - g_i(z')||^2 / ||z - z'||^2)``. Half the pairs are
    independent draws in a ball of the given radius (projected onto the feasible
    sets), the other half are short perturbations of such a draw.
    """
    if num_pairs < 1:
        raise UsageError("num_pairs must be >= 1")
    if radius <= 0:
        raise UsageError("radius must be positive")
    rng = make_rng(seed)
    best = 0.0
    for k in range(num_pairs):
        while True:
            z1 = _sample_point(problem, rng, radius)
            if k % 2 == 0:
                z2 = _sample_point(problem, rng, radius)
            else:
                z2 = problem.project(z1 + 1e-3 * radius * rng.standard_normal(problem.dim))
            dist2 = float(np.dot(z1 - z2, z1 - z2))
            if dist2 > 0.0:
                break
        sq = problem.component_diff_sq_norms(z1, z2)
        best = max(best, float(np.sqrt(np.mean(sq) / dist2)))
    return best


@dataclass(frozen=True)
class ProblemConstants:
    n: int
    L: float
    mu_x: float = 0.0
    mu_y: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise UsageError("n must be >= 1")
        if not self.L > 0:
            raise UsageError("L must be positive")
        if self.mu_x < 0 or self.mu_y < 0:
            raise UsageError("strong convexity moduli must be nonnegative")

    @property
    def kappa_x(self) -> float:
        return self.L / self.mu_x if self.mu_x > 0 else float("inf")

    @property
    def kappa_y(self) -> float:
        return self.L / self.mu_y if self.mu_y > 0 else float("inf")
