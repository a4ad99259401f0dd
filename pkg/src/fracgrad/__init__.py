"""Fractional-order gradient descent via the Caputo series, and a numerical
auditor for the inequality chain used to argue its convergence."""

from .caputo import SeriesResult, SeriesStatus, TruncationPolicy, caputo_quadrature, caputo_series
from .errors import DomainError, GammaOverflowError, InsufficientTail, NotFound, TerminalOrderError
from .functions import (
    ConstantOrder,
    EvalPoint,
    Exponential,
    Polynomial,
    RationalPole,
    ShiftedQuadratic,
    SigmoidOrder,
    parse_function,
    schedule_alpha,
)
from .optimize import Algorithm, FractionalConfig, StopRule, Trajectory, Warmup, run
from .special_fn import GammaMode, gamma, gen_binomial

__version__ = "0.1.0"
