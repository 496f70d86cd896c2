"""Checkpoint records shared by all solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import PrimalDualPoint, UsageError


@dataclass(frozen=True)
class Checkpoint:
    iteration: int
    sfo_calls: int
    metrics: dict


@dataclass
class SolverTrace:
    """What a run leaves behind: checkpoints, the seed, resolved params and the final point.

    ``sfo_calls`` counts algorithm work only. Metric evaluations are charged to
    ``measurement_calls``.
    """

    n: int
    seed: int | None = None
    params: dict = field(default_factory=dict)
    checkpoints: list = field(default_factory=list)
    final: PrimalDualPoint | None = None
    iterations: int = 0
    sfo_calls: int = 0
    refreshes: int = 0
    measurement_calls: int = 0

    @property
    def metric_names(self) -> list[str]:
        return list(self.checkpoints[0].metrics) if self.checkpoints else []

    def column(self, name: str) -> np.ndarray:
        return np.array([c.metrics[name] for c in self.checkpoints])

    def last(self, name: str) -> float:
        return self.checkpoints[-1].metrics[name]


class _Recorder:
    """Appends checkpoints at iteration 0, every ``every`` iterations and on demand."""

    def __init__(self, trace: SolverTrace, every: int, metrics, to_outer=None):
        if every < 1:
            raise UsageError("trace_every must be >= 1")
        self.trace = trace
        self.every = int(every)
        self.metrics = metrics
        self.to_outer = to_outer
        self.last_iteration = None

    def __call__(self, t: int, z, calls: int, force: bool = False):
        if not force and t % self.every:
            return
        if self.last_iteration == t:
            return
        self.last_iteration = t
        values = {}
        if self.metrics is not None:
            values = self.metrics(z if self.to_outer is None else self.to_outer(z))
        self.trace.checkpoints.append(Checkpoint(int(t), int(calls), dict(values)))

    def close(self, t: int, z, calls: int):
        self(t, z, calls, force=True)
        if self.metrics is not None:
            self.trace.measurement_calls = getattr(self.metrics, "calls", 0)
