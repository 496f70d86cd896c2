from .alsvre import alsvre_run
from .extragradient import extragradient_run
from .lsvre import LsvreParams, lsvre_default_params, lsvre_run
from .schedules import (ScheduleParams, TheorySchedule, alsvre_default_params, estimate_delta_f,
                        select_beta, theory_schedule)
from .trace import Checkpoint, SolverTrace

__all__ = [
    "Checkpoint", "LsvreParams", "ScheduleParams", "SolverTrace", "TheorySchedule",
    "alsvre_default_params", "alsvre_run", "estimate_delta_f", "extragradient_run",
    "lsvre_default_params", "lsvre_run", "select_beta", "theory_schedule",
]
