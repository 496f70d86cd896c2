from .base import FiniteSumProblem
from .quadratic import (QuadraticProblem, exact_average_smoothness, make_quadratic_scsc,
                        quadratic_saddle_oracle)
from .auc import AucProblem, make_auc
from .wireless import WirelessProblem, gen_wireless, gen_wireless_channels, make_wireless
from .regularized import RegularizedProblem, TransposedProblem, wrap_both, wrap_strongly_concave
from .toy import CoordinateSquares, LinearComponents

__all__ = [
    "FiniteSumProblem", "QuadraticProblem", "exact_average_smoothness", "make_quadratic_scsc",
    "quadratic_saddle_oracle", "AucProblem", "make_auc", "WirelessProblem", "gen_wireless",
    "gen_wireless_channels", "make_wireless", "RegularizedProblem", "TransposedProblem",
    "wrap_both", "wrap_strongly_concave", "CoordinateSquares", "LinearComponents",
]
