"""Caputo fractional derivative of order 0 < alpha <= 1.

``caputo_series`` sums the expansion in derivatives of f at the upper
limit,

    sum_{i>=1} binom(alpha-1, i-1) f^(i)(x) / Gamma(i+1-alpha) * (x-c)^(i-alpha),

under an explicit truncation policy. ``caputo_quadrature`` evaluates the
integral definition

    1/Gamma(1-alpha) * int_c^x f'(t) (x-t)^(-alpha) dt

with Gauss-Jacobi nodes and serves as an independent check on the series.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, DomainReason, TerminalOrderError
from .functions import DifferentiableFunction
from .special_fn import GammaMode, default_mode, gamma, gen_binomial

__all__ = [
    "TruncationPolicy",
    "SeriesStatus",
    "SeriesResult",
    "series_coefficient",
    "caputo_series",
    "caputo_series_gap",
    "caputo_quadrature",
]


@dataclass(frozen=True)
class TruncationPolicy:
    abs_tol: float = 1e-14
    max_terms: int = 64
    divergence_window: int = 8

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol!r}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms!r}")
        if self.divergence_window < 1:
            raise ValueError(f"divergence_window must be >= 1, got {self.divergence_window!r}")


class SeriesStatus(enum.Enum):
    CONVERGED_BY_TOLERANCE = "ConvergedByTolerance"
    EXACT_FINITE = "ExactFinite"
    TRUNCATED_AT_MAX = "TruncatedAtMax"
    DIVERGENCE_SUSPECTED = "DivergenceSuspected"


@dataclass
class SeriesResult:
    value: float
    terms_used: int
    status: SeriesStatus
    term_log: list[tuple[int, float]] | None = field(default=None, repr=False)


def series_coefficient(alpha: float, i: int, mode: GammaMode) -> float:
    """binom(alpha-1, i-1) / Gamma(i+1-alpha), the weight of f^(i)(x) (x-c)^(i-alpha)."""
    return gen_binomial(alpha - 1.0, i - 1, mode) / gamma(i + 1.0 - alpha, mode)


def caputo_series_gap(
    f: DifferentiableFunction,
    alpha: float,
    gap: float,
    x: float,
    policy: TruncationPolicy | None = None,
    mode: GammaMode | None = None,
    log_terms: bool = False,
) -> SeriesResult:
    """Series evaluated with ``gap`` standing in for x - c (``gap >= 0``).

    Shared by ``caputo_series`` and by callers that evaluate the series
    with |x - c| when the terminal lies above the iterate.
    """
    if policy is None:
        policy = TruncationPolicy()
    if mode is None:
        mode = default_mode()
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if gap < 0:
        raise ValueError(f"gap must be >= 0, got {gap!r}")
    degree = f.degree
    log = [] if log_terms else None

    if gap == 0.0 and alpha < 1.0:
        # every term carries gap**(i - alpha) with i - alpha > 0
        status = SeriesStatus.EXACT_FINITE if degree is not None else SeriesStatus.CONVERGED_BY_TOLERANCE
        return SeriesResult(0.0, 0, status, log)

    if degree is not None:
        n_terms = min(degree, policy.max_terms)
    else:
        n_terms = policy.max_terms

    total = 0.0
    used = 0
    small_run = 0
    growth_run = 0
    prev_mag = None
    status = SeriesStatus.TRUNCATED_AT_MAX
    for i in range(1, n_terms + 1):
        term = series_coefficient(alpha, i, mode) * f.derivative(i, x) * gap ** (i - alpha)
        total = term if i == 1 else total + term
        used = i
        if log is not None:
            log.append((i, term))
        if degree is not None:
            continue
        mag = abs(term)
        if mag < policy.abs_tol:
            small_run += 1
            if small_run >= 2:
                status = SeriesStatus.CONVERGED_BY_TOLERANCE
                break
        else:
            small_run = 0
        if prev_mag is not None and mag > prev_mag:
            growth_run += 1
            if growth_run >= policy.divergence_window:
                status = SeriesStatus.DIVERGENCE_SUSPECTED
                break
        else:
            growth_run = 0
        prev_mag = mag
    if degree is not None:
        status = SeriesStatus.EXACT_FINITE if n_terms == degree else SeriesStatus.TRUNCATED_AT_MAX
    return SeriesResult(total, used, status, log)


def caputo_series(
    f: DifferentiableFunction,
    alpha: float,
    c: float,
    x: float,
    policy: TruncationPolicy | None = None,
    mode: GammaMode | None = None,
    log_terms: bool = False,
) -> SeriesResult:
    """Caputo derivative of ``f`` with lower terminal ``c`` at ``x >= c``.

    At ``alpha = 1`` the binomial weights of every term past the first are
    exactly zero and the result is f'(x). At ``x = c`` and ``alpha < 1``
    the result is 0.

    >>> from fracgrad.functions import Polynomial
    >>> caputo_series(Polynomial((0.0, 1.0)), 0.5, 0.0, 1.0).value
    1.1283791670955126
    """
    if x < c:
        raise TerminalOrderError(x, c)
    for point in (c, x):
        if not f.in_domain(point):
            raise DomainError(DomainReason.OUTSIDE_FUNCTION_DOMAIN, point,
                              f"{point!r} outside the function domain {f.domain}")
    return caputo_series_gap(f, alpha, x - c, x, policy, mode, log_terms)


@functools.lru_cache(maxsize=64)
def _jacobi_rule(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    # weight (1 - s)^(-alpha) on [-1, 1]
    nodes, weights = roots_jacobi(n, -alpha, 0.0)
    return nodes, weights


def caputo_quadrature(
    f: DifferentiableFunction,
    alpha: float,
    c: float,
    x: float,
    n_nodes: int = 400,
) -> float:
    """Caputo derivative from the integral definition (Gauss-Jacobi rule).

    Mapping t = c + (x-c)(1+s)/2 turns the kernel into
    ((x-c)/2)^(-alpha) (1-s)^(-alpha), which the Jacobi weight absorbs, so
    the rule is exact for polynomial f of degree <= 2 n_nodes.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not c < x:
        raise TerminalOrderError(x, c)
    if n_nodes < 1:
        raise ValueError("n_nodes must be positive")
    for point in (c, x):
        if not f.in_domain(point):
            raise DomainError(DomainReason.OUTSIDE_FUNCTION_DOMAIN, point,
                              f"{point!r} outside the function domain {f.domain}")
    nodes, weights = _jacobi_rule(n_nodes, float(alpha))
    half = 0.5 * (x - c)
    ts = c + half * (1.0 + nodes)
    fp = np.array([f.derivative(1, float(t)) for t in ts])
    integral = half ** (1.0 - alpha) * float(np.dot(weights, fp))
    return integral / math.gamma(1.0 - alpha)
