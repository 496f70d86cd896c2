"""Convergence measures and the measurement-side oracle counter."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Oracle, PrimalDualPoint, UsageError, _as_flat

METRIC_KINDS = ("dist2", "grad_norm", "grad_mapping", "gap")


def distance_to_saddle(z, z_star, squared: bool = False) -> float:
    z = z.z if isinstance(z, PrimalDualPoint) else np.asarray(z, dtype=float)
    z_star = z_star.z if isinstance(z_star, PrimalDualPoint) else np.asarray(z_star, dtype=float)
    if z.shape != z_star.shape:
        raise UsageError("point and reference have different shapes")
    d2 = float(np.dot(z - z_star, z - z_star))
    return d2 if squared else float(np.sqrt(d2))


def gradient_norm(problem, z, oracle: Oracle | None = None) -> float:
    """``||g(z)||`` for the mean objective; n SFO on ``oracle``."""
    z = _as_flat(problem, z)
    oracle = oracle or Oracle(problem)
    return float(np.linalg.norm(oracle.full(z)))


def gradient_mapping_norm(problem, z, tau_hat: float = 0.1, oracle: Oracle | None = None) -> float:
    """``(||x - P_X(x - t grad_x f)|| + ||y - P_Y(y + t grad_y f)||) / t``."""
    if not tau_hat > 0:
        raise UsageError("tau_hat must be positive")
    z = _as_flat(problem, z)
    oracle = oracle or Oracle(problem)
    r = z - problem.project(z - tau_hat * oracle.full(z))
    rx, ry = problem.split(r)
    return float((np.linalg.norm(rx) + np.linalg.norm(ry)) / tau_hat)


def _spd_solve(M, rhs, name):
    S = 0.5 * (M + M.T)
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise UsageError(f"mean {name} block is not positive definite") from None
    return np.linalg.solve(S, rhs)


def best_response_y(problem, x) -> np.ndarray:
    """``argmax_y f(x, y)`` for an unconstrained quadratic."""
    return _spd_solve(problem.C_mean, problem.B_mean.T @ x - problem.c_mean, "C")


def best_response_x(problem, y) -> np.ndarray:
    """``argmin_x f(x, y)`` for an unconstrained quadratic."""
    return _spd_solve(problem.A_mean, -(problem.B_mean @ y + problem.a_mean), "A")


def gap_halves(problem, z) -> tuple[float, float]:
    """``(max_y f(x, y) - f(z), f(z) - min_x f(x, y))``; both are nonnegative."""
    if not getattr(problem, "unconstrained", False):
        raise UsageError("exact gaps need an unconstrained quadratic problem")
    x, y = problem.split(_as_flat(problem, z))
    fz = problem.value(x, y)
    upper = problem.value(x, best_response_y(problem, x))
    lower = problem.value(best_response_x(problem, y), y)
    return upper - fz, fz - lower


def saddle_excess(problem, z, z_star) -> tuple[float, float]:
    """``(max_y f(x, y) - f(z*), f(z*) - min_x f(x, y))`` for an unconstrained quadratic."""
    if not getattr(problem, "unconstrained", False):
        raise UsageError("exact gaps need an unconstrained quadratic problem")
    x, y = problem.split(_as_flat(problem, z))
    f_star = problem.objective(_as_flat(problem, z_star))
    return (problem.value(x, best_response_y(problem, x)) - f_star,
            f_star - problem.value(best_response_x(problem, y), y))


def duality_gap_quadratic(problem, z) -> float:
    """``max_y f(x, y) - min_x f(x, y)`` by two linear solves."""
    up, down = gap_halves(problem, z)
    return up + down


def projected_gradient_step(problem, z, eta: float, oracle: Oracle | None = None) -> np.ndarray:
    """``P(z - eta g(z))``, the correction applied after each inner solve."""
    z = _as_flat(problem, z)
    oracle = oracle or Oracle(problem)
    return problem.project(z - eta * oracle.full(z))


@dataclass(frozen=True)
class MetricSpec:
    kind: str
    z_star: np.ndarray | None = None
    tau_hat: float = 0.1

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise UsageError(f"unknown metric {self.kind!r}; choose from {', '.join(METRIC_KINDS)}")
        if self.kind == "dist2" and self.z_star is None:
            raise UsageError("dist2 needs a reference saddle point")
        if not self.tau_hat > 0:
            raise UsageError("tau_hat must be positive")


class MetricRecorder:
    """Evaluates a list of metrics; oracle work goes to its own ``calls`` counter."""

    def __init__(self, problem, specs):
        self.problem = problem
        self.specs = list(specs)
        self.oracle = Oracle(problem)
        if any(s.kind == "gap" for s in self.specs) and not getattr(problem, "unconstrained", False):
            raise UsageError("gap metric needs an unconstrained quadratic problem")

    @property
    def names(self) -> list[str]:
        return [s.kind for s in self.specs]

    @property
    def calls(self) -> int:
        return self.oracle.calls

    def __call__(self, z) -> dict:
        out = {}
        for s in self.specs:
            if s.kind == "dist2":
                out["dist2"] = distance_to_saddle(z, s.z_star, squared=True)
            elif s.kind == "grad_norm":
                out["grad_norm"] = gradient_norm(self.problem, z, self.oracle)
            elif s.kind == "grad_mapping":
                out["grad_mapping"] = gradient_mapping_norm(self.problem, z, s.tau_hat, self.oracle)
            else:
                out["gap"] = duality_gap_quadratic(self.problem, z)
        return out


def make_metrics(problem, names, z_star=None, tau_hat: float = 0.1) -> MetricRecorder:
    if isinstance(z_star, PrimalDualPoint):
        z_star = z_star.z
    return MetricRecorder(problem, [MetricSpec(k, z_star, tau_hat) for k in names])
