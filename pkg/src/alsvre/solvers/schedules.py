"""Parameter selection for the accelerated two-loop solver."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import UsageError


@dataclass(frozen=True)
class ScheduleParams:
    """Outer-loop configuration. ``tau`` and ``T`` are the same in every round."""

    beta: float
    q: float
    rho: float
    p: float
    tau: float
    T: int
    K: int
    mode: str = "practical"
    seed: int = 0
    transposed: bool = False

    def __post_init__(self):
        if self.beta < 0:
            raise UsageError("beta must be >= 0")
        if not 0 < self.q <= 1:
            raise UsageError("q must lie in (0, 1]")
        if not 0 < self.rho < math.sqrt(self.q):
            raise UsageError("rho must lie in (0, sqrt(q))")
        if not 0 < self.p <= 1:
            raise UsageError("p must lie in (0, 1]")
        if not self.tau > 0:
            raise UsageError("tau must be positive")
        if self.T < 0:
            raise UsageError("T must be >= 0")
        if self.K <= 0:
            raise UsageError("K must be >= 1")
        if self.mode not in ("theory", "practical"):
            raise UsageError("mode must be 'theory' or 'practical'")

    @property
    def gamma(self) -> float:
        s = math.sqrt(self.q)
        return (1.0 - s) / (1.0 + s)

    def tau_k(self, k: int) -> float:
        return self.tau

    def T_k(self, k: int) -> int:
        return self.T

    def as_dict(self) -> dict:
        return {"beta": self.beta, "q": self.q, "gamma": self.gamma, "rho": self.rho, "p": self.p,
                "tau": self.tau, "T": self.T, "K": self.K, "mode": self.mode, "seed": self.seed,
                "transposed": self.transposed}


@dataclass(frozen=True)
class TheorySchedule:
    """Per-round inner accuracy ``epsilon_k`` and outer suboptimality ``delta_k``."""

    Delta_f: float
    n: int
    L: float
    mu_y: float
    beta: float
    q: float
    rho: float

    def epsilon_k(self, k: int) -> float:
        Lb = self.L + self.beta
        return (2.0 * self.mu_y * self.Delta_f * (1.0 - self.rho) ** k
                / (3.0 * Lb * (7.0 * Lb + 2.0 * math.sqrt(self.n) * self.mu_y)))

    def delta_k(self, k: int) -> float:
        return 8.0 * self.Delta_f * (1.0 - self.rho) ** (k + 1) / (math.sqrt(self.q) - self.rho) ** 2


def select_beta(n: int, L: float, mu_x: float, mu_y: float) -> float:
    """Three-case rule for the proximal weight (assumes ``mu_x <= mu_y``)."""
    root_n = math.sqrt(n)
    kx, ky = L / mu_x, L / mu_y
    if ky >= root_n:
        return mu_y - mu_x
    if kx > root_n:
        return L / root_n - mu_x
    return 0.0


def theory_inner_iterations(n, L, mu_x, mu_y, beta, q, rho) -> int:
    Lb = L + beta
    root_n = math.sqrt(n)
    inner = (2.0 / (1.0 - rho) + 1728.0 * beta * Lb * (7.0 * Lb + 2.0 * root_n * mu_y)
             / (mu_x * mu_y * min(mu_x, mu_y) * (1.0 - rho) ** 2 * (math.sqrt(q) - rho) ** 2))
    return math.ceil(4.0 * (n + 2.0 * root_n * Lb / min(mu_x + beta, mu_y)) * math.log(12.0 * inner))


def theory_outer_rounds(n, kappa_x, kappa_y, q, Delta_f, epsilon) -> int:
    arg = 10992.0 * math.sqrt(n) * Delta_f * kappa_y * kappa_x ** 3 / epsilon
    if arg <= 1.0:
        return 1
    return max(1, math.ceil(2.0 / math.sqrt(q) * math.log(arg)))


def estimate_delta_f(problem, z0) -> float:
    """Upper bound on ``max_y f(x0, y) - min_x f(x, y0)`` from one gradient at ``z0``.

    Each side uses ``||grad|| * diameter`` on a bounded set, otherwise
    ``||grad||^2 / (2 mu)``; both follow from convexity (resp. strong convexity).
    """
    z0 = problem.project(problem.check_point(z0))
    x0, y0 = problem.split(z0)
    gx, gy = problem.partials(x0, y0)
    c = problem.constants
    total = 0.0
    for g, fset, dim, mu, name in ((gx, problem.x_set, problem.dx, c.mu_x, "x"),
                                   (gy, problem.y_set, problem.dy, c.mu_y, "y")):
        norm = float(np.linalg.norm(g))
        if fset.bounded:
            total += norm * fset.diameter(dim)
        elif mu > 0:
            total += norm * norm / (2.0 * mu)
        else:
            raise UsageError(f"cannot bound Delta_f: {name} is unbounded with zero modulus; pass delta_f")
    return total


def alsvre_default_params(problem, epsilon: float | None = None, mode: str = "practical", *,
                          c: float = 0.5, budget_sfo: int | None = None, K: int | None = None,
                          delta_f: float | None = None, z0=None, rho: float | None = None,
                          p: float | None = None, beta: float | None = None,
                          tau: float | None = None, seed: int = 0) -> ScheduleParams:
    """Resolve beta, q, rho, p, tau, T and K from the problem constants.

    When ``mu_x > mu_y`` the roles are swapped (``transposed=True``) and the run
    operates on the transposed problem. Explicit ``beta``, ``rho``, ``p`` and ``tau``
    override the defaults. Practical mode uses ``T = ceil(c n)`` and
    takes ``K`` directly or sizes it from ``budget_sfo``.
    """
    cst = problem.constants
    if cst.mu_x == 0 or cst.mu_y == 0:
        raise UsageError("need mu_x > 0 and mu_y > 0; wrap the problem first "
                         "(wrap_strongly_concave or wrap_both)")
    n, L = cst.n, cst.L
    mu_x, mu_y = cst.mu_x, cst.mu_y
    transposed = mu_x > mu_y
    if transposed:
        mu_x, mu_y = mu_y, mu_x
    if beta is None:
        beta = select_beta(n, L, mu_x, mu_y)
    q = mu_x / (mu_x + beta)
    rho = 0.5 * math.sqrt(q) if rho is None else rho
    p = 1.0 / (2.0 * n) if p is None else p
    if tau is None:
        tau = 1.0 / (4.0 * math.sqrt(n) * (L + beta))
    if mode == "theory":
        if epsilon is None or not epsilon > 0:
            raise UsageError("theory mode needs epsilon > 0")
        if delta_f is None:
            delta_f = estimate_delta_f(problem, problem.center if z0 is None else z0)
        T = theory_inner_iterations(n, L, mu_x, mu_y, beta, q, rho)
        if K is None:
            K = theory_outer_rounds(n, L / mu_x, L / mu_y, q, delta_f, epsilon)
    elif mode == "practical":
        if not c > 0:
            raise UsageError("c must be positive")
        T = math.ceil(c * n)
        if K is None:
            if budget_sfo is None:
                raise UsageError("practical mode needs K or budget_sfo")
            per_round = 2 * n + T * (2 + p * n)
            K = max(1, math.ceil(budget_sfo / per_round) + 1)
    else:
        raise UsageError("mode must be 'theory' or 'practical'")
    return ScheduleParams(beta=beta, q=q, rho=rho, p=p, tau=tau, T=T, K=int(K), mode=mode,
                          seed=seed, transposed=transposed)


def theory_schedule(problem, params: ScheduleParams, delta_f: float) -> TheorySchedule:
    cst = problem.constants
    mu_y = cst.mu_x if params.transposed else cst.mu_y
    return TheorySchedule(delta_f, cst.n, cst.L, mu_y, params.beta, params.q, params.rho)
