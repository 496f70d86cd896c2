"""Exact Euclidean projections onto the feasible sets used by the problem families."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import UsageError

KINDS = ("whole_space", "ball", "nonneg_ball", "simplex_sum", "box")


@dataclass(frozen=True)
class FeasibleSet:
    """A closed convex set. Build instances through the module-level constructors."""

    kind: str
    radius: float = 0.0
    total: float = 0.0
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown set kind {self.kind!r}")
        if self.kind in ("ball", "nonneg_ball") and not self.radius > 0:
            raise UsageError("ball radius must be positive")
        if self.kind == "simplex_sum" and not self.total > 0:
            raise UsageError("simplex target sum must be positive")
        if self.kind == "box":
            lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
            hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
            if lo.shape != hi.shape or np.any(lo > hi):
                raise UsageError("box needs lo <= hi coordinatewise")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)

    @property
    def bounded(self) -> bool:
        return self.kind != "whole_space"

    def diameter(self, dim: int) -> float:
        if self.kind == "whole_space":
            return math.inf
        if self.kind == "ball":
            return 2.0 * self.radius
        if self.kind == "nonneg_ball":
            return self.radius * (math.sqrt(2.0) if dim > 1 else 1.0)
        if self.kind == "simplex_sum":
            return self.total * math.sqrt(2.0) if dim > 1 else 0.0
        return float(np.linalg.norm(np.broadcast_to(self.hi - self.lo, (dim,))))

    def contains(self, z, tol: float = 1e-10) -> bool:
        z = np.asarray(z, dtype=float)
        if self.kind == "whole_space":
            return True
        if self.kind == "ball":
            return np.linalg.norm(z) <= self.radius + tol
        if self.kind == "nonneg_ball":
            return bool(np.all(z >= -tol)) and np.linalg.norm(z) <= self.radius + tol
        if self.kind == "simplex_sum":
            return bool(np.all(z >= -tol)) and abs(z.sum() - self.total) <= tol * max(1.0, self.total)
        return bool(np.all(z >= self.lo - tol) and np.all(z <= self.hi + tol))

    def project(self, z) -> np.ndarray:
        return project(self, z)

    def center(self, dim: int) -> np.ndarray:
        """A point inside the set, used to seed random sampling."""
        if self.kind == "simplex_sum":
            return np.full(dim, self.total / dim)
        if self.kind == "box":
            return np.broadcast_to(0.5 * (self.lo + self.hi), (dim,)).copy()
        return np.zeros(dim)


def whole_space() -> FeasibleSet:
    return FeasibleSet("whole_space")


def ball(radius: float) -> FeasibleSet:
    return FeasibleSet("ball", radius=float(radius))


def nonneg_ball(radius: float) -> FeasibleSet:
    return FeasibleSet("nonneg_ball", radius=float(radius))


def simplex_sum(total: float) -> FeasibleSet:
    return FeasibleSet("simplex_sum", total=float(total))


def box(lo, hi) -> FeasibleSet:
    return FeasibleSet("box", lo=lo, hi=hi)


def _scale_into_ball(u: np.ndarray, radius: float) -> np.ndarray:
    norm = np.linalg.norm(u)
    if norm > radius:
        return u * (radius / norm)
    return u


def project_simplex(z: np.ndarray, total: float) -> np.ndarray:
    """Sort-based threshold projection onto ``{u >= 0, sum(u) = total}``."""
    u = np.sort(z)[::-1]
    css = np.cumsum(u) - total
    ranks = np.arange(1, z.size + 1)
    rho = np.nonzero(u * ranks > css)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(z - theta, 0.0)


def project(fset: FeasibleSet, z) -> np.ndarray:
    """Euclidean projection of ``z`` onto ``fset``; always returns a new array."""
    z = np.asarray(z, dtype=float)
    kind = fset.kind
    if kind == "whole_space":
        return z.copy()
    if kind == "ball":
        return _scale_into_ball(z.copy(), fset.radius)
    if kind == "nonneg_ball":
        # clipping then scaling is exact: the orthant face and the radial
        # multiplier decouple in the KKT system
        return _scale_into_ball(np.maximum(z, 0.0), fset.radius)
    if kind == "simplex_sum":
        return project_simplex(z, fset.total)
    return np.clip(z, fset.lo, fset.hi)
