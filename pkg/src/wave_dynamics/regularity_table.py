"""
Predicted spatial regularities of the Gaussian data, the leading stochastic
object and the deterministic remainder for Hartree nonlinearities in d = 3.
"""

from typing import Literal, NamedTuple

from src.core_tools.errors import ParameterRangeError

Equation = Literal["wave", "schrodinger"]


class PredictedRegularity(NamedTuple):
    s_gaussian: float
    s_probabilistic: float
    s_deterministic: float


def predicted_regularity(eq: Equation, beta: float) -> PredictedRegularity:
    if not 0.0 < beta < 3.0:
        raise ParameterRangeError(f"beta must lie in (0, 3), got {beta}")
    s_det = max((1.0 - 2.0 * beta) / 2.0, 0.0)
    if eq == "wave":
        return PredictedRegularity(-0.5, -min((2.0 + beta) / 3.0, 1.5), s_det)
    if eq == "schrodinger":
        return PredictedRegularity(-0.5, -min((1.0 + beta) / 2.0, 1.0), s_det)
    raise ParameterRangeError(f"unknown equation {eq!r}")
