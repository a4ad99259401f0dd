"""Fractional-order descent schemes and trajectory recording.

Three update rules share one driver, ``run``:

* ``Algorithm.ALGO1``: x_{k+1} = x_k - mu * D^alpha f(x_k), with the
  derivative's lower terminal at the lagged iterate x_{k-K}.
* ``Algorithm.ALGO3``: the same series with a fixed terminal c and an
  order alpha drawn from a schedule, held fixed within each step.
* ``Algorithm.GD``: classical gradient descent, the alpha = 1 baseline.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

from .caputo import SeriesStatus, TruncationPolicy, caputo_series_gap
from .errors import DomainError, DomainReason, GammaOverflowError, TerminalOrderError
from .functions import ConstantOrder, DifferentiableFunction, OrderSchedule, schedule_alpha
from .special_fn import GammaMode, default_mode

__all__ = [
    "Algorithm",
    "Warmup",
    "TerminalPolicy",
    "TerminalStatus",
    "StopRule",
    "FractionalConfig",
    "StepRecord",
    "Trajectory",
    "algo1_step",
    "algo3_step",
    "gd_step",
    "run",
    "trajectory_to_csv",
    "trajectory_from_csv",
    "CSV_COLUMNS",
]

GRADIENT_STATUS = "Gradient"


class Algorithm(enum.Enum):
    ALGO1 = "algo1"
    ALGO3 = "algo3"
    GD = "gd"


class Warmup(enum.Enum):
    """How the lagged terminal is supplied before K iterates exist.

    REPLICATE_X0 pads the history with x0. Note that for alpha < 1 this
    makes the first gap zero, the first step zero, and the run stalls at x0.
    GD_BOOTSTRAP takes the first K steps with classical gradient descent.
    """

    REPLICATE_X0 = "replicate_x0"
    GD_BOOTSTRAP = "gd_bootstrap"


class TerminalPolicy(enum.Enum):
    """What to do when the iterate lies below its lower terminal.

    SYMMETRIC evaluates the series with |x - c| as the power base, so the
    first term keeps the sign of f'(x). ERROR raises TerminalOrderError.
    """

    SYMMETRIC = "symmetric"
    ERROR = "error"


class TerminalStatus(enum.Enum):
    STOPPED_BY_TOLERANCE = "StoppedByTolerance"
    MAX_ITERS = "MaxIters"
    SERIES_DOMAIN_ERROR = "SeriesDomainError"
    SERIES_DIVERGENCE = "SeriesDivergence"
    TERMINAL_ORDER_ERROR = "TerminalOrderError"
    LEFT_FUNCTION_DOMAIN = "LeftFunctionDomain"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class StopRule:
    step_tol: float = 1e-10
    max_iters: int = 1000

    def __post_init__(self):
        if self.step_tol < 0:
            raise ValueError("step_tol must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class FractionalConfig:
    alpha: float = 0.5
    mu: float = 0.1
    K: int = 1
    x0: float = 0.0
    c: float = 0.0
    schedule: OrderSchedule | None = None
    warmup: Warmup = Warmup.GD_BOOTSTRAP
    terminal_policy: TerminalPolicy = TerminalPolicy.SYMMETRIC
    truncation: TruncationPolicy = field(default_factory=TruncationPolicy)
    gamma_mode: GammaMode = field(default_factory=default_mode)
    stop: StopRule = field(default_factory=StopRule)

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu!r}")
        if self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")

    def order_schedule(self) -> OrderSchedule:
        if self.schedule is not None:
            return self.schedule
        return ConstantOrder(self.alpha)


@dataclass
class StepRecord:
    k: int
    x: float
    derivative: float
    terms_used: int
    status: str
    lag_gap: float
    alpha: float = 1.0


@dataclass
class Trajectory:
    iterates: list[float]
    steps: list[StepRecord]
    terminal_status: TerminalStatus
    message: str = ""

    @property
    def final(self) -> float:
        return self.iterates[-1]

    def __len__(self) -> int:
        return len(self.iterates)


def gd_step(f: DifferentiableFunction, cfg: FractionalConfig, k: int, x: float) -> tuple[float, StepRecord]:
    d = f.derivative(1, x)
    return x - cfg.mu * d, StepRecord(k, x, d, 1, GRADIENT_STATUS, 0.0, 1.0)


def _fractional_step(f, cfg, k, x, terminal, alpha):
    if not f.in_domain(terminal):
        raise DomainError(DomainReason.OUTSIDE_FUNCTION_DOMAIN, terminal,
                          f"terminal {terminal!r} outside the function domain {f.domain}")
    if x < terminal and cfg.terminal_policy is TerminalPolicy.ERROR:
        raise TerminalOrderError(x, terminal)
    gap = abs(x - terminal)
    res = caputo_series_gap(f, alpha, gap, x, cfg.truncation, cfg.gamma_mode)
    rec = StepRecord(k, x, res.value, res.terms_used, res.status.value, gap, alpha)
    return x - cfg.mu * res.value, rec


def algo1_step(
    f: DifferentiableFunction, cfg: FractionalConfig, history: list[float], k: int = 0
) -> tuple[float, StepRecord]:
    """One moving-terminal step; ``history`` is [x_{k-K}, ..., x_k]."""
    if len(history) != cfg.K + 1:
        raise ValueError(f"history must hold K+1={cfg.K + 1} iterates, got {len(history)}")
    return _fractional_step(f, cfg, k, history[-1], history[0], cfg.alpha)


def algo3_step(f: DifferentiableFunction, cfg: FractionalConfig, x: float, k: int = 0) -> tuple[float, StepRecord]:
    """One fixed-terminal step with the order drawn from the schedule."""
    alpha = schedule_alpha(cfg.order_schedule(), x, cfg.c)
    return _fractional_step(f, cfg, k, x, cfg.c, alpha)


def run(f: DifferentiableFunction, cfg: FractionalConfig, algorithm: Algorithm = Algorithm.ALGO1) -> Trajectory:
    """Iterate until the stop rule fires or a step cannot be taken.

    A failed step is not recorded; ``terminal_status`` and ``message`` say
    why the run ended.
    """
    algorithm = Algorithm(algorithm)
    if not f.in_domain(cfg.x0):
        raise ValueError(f"x0={cfg.x0!r} outside the function domain {f.domain}")
    iterates = [float(cfg.x0)]
    steps: list[StepRecord] = []
    status = TerminalStatus.MAX_ITERS
    message = ""
    K = cfg.K
    for k in range(cfg.stop.max_iters):
        x = iterates[-1]
        try:
            if algorithm is Algorithm.GD or (
                algorithm is Algorithm.ALGO1 and cfg.warmup is Warmup.GD_BOOTSTRAP and k < K
            ):
                x_next, rec = gd_step(f, cfg, k, x)
            elif algorithm is Algorithm.ALGO1:
                history = [iterates[j] if j >= 0 else iterates[0] for j in range(k - K, k + 1)]
                x_next, rec = algo1_step(f, cfg, history, k)
            else:
                x_next, rec = algo3_step(f, cfg, x, k)
        except TerminalOrderError as exc:
            status, message = TerminalStatus.TERMINAL_ORDER_ERROR, str(exc)
            break
        except DomainError as exc:
            if exc.reason is DomainReason.OUTSIDE_FUNCTION_DOMAIN:
                status = TerminalStatus.LEFT_FUNCTION_DOMAIN
            else:
                status = TerminalStatus.SERIES_DOMAIN_ERROR
            message = str(exc)
            break
        except (GammaOverflowError, OverflowError, ZeroDivisionError) as exc:
            status, message = TerminalStatus.DIVERGED, str(exc)
            break
        if rec.status == SeriesStatus.DIVERGENCE_SUSPECTED.value:
            status = TerminalStatus.SERIES_DIVERGENCE
            message = f"series terms kept growing at k={k} (gap {rec.lag_gap!r})"
            break
        if not math.isfinite(x_next):
            status, message = TerminalStatus.DIVERGED, f"iterate overflowed at k={k}"
            break
        iterates.append(x_next)
        steps.append(rec)
        if abs(x_next - x) < cfg.stop.step_tol:
            status = TerminalStatus.STOPPED_BY_TOLERANCE
            break
    return Trajectory(iterates, steps, status, message)


CSV_COLUMNS = ("k", "x_k", "D_k", "terms_used", "series_status", "lag_gap")


def _fmt(x: float) -> str:
    return format(x, ".17g")


def trajectory_to_csv(traj: Trajectory) -> str:
    """One row per step, then a final row holding x_T with empty step fields."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in traj.steps:
        w.writerow([rec.k, _fmt(rec.x), _fmt(rec.derivative), rec.terms_used, rec.status, _fmt(rec.lag_gap)])
    w.writerow([len(traj.steps), _fmt(traj.final), "", "", "", ""])
    return buf.getvalue()


def trajectory_from_csv(
    text: str,
    terminal_status: TerminalStatus | str = TerminalStatus.MAX_ITERS,
    message: str = "",
    alphas: list[float] | None = None,
) -> Trajectory:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("trajectory CSV has no rows")
    if tuple(rows[0].keys()) != CSV_COLUMNS:
        raise ValueError(f"unexpected trajectory columns {tuple(rows[0].keys())}")
    iterates = [float(r["x_k"]) for r in rows]
    steps = []
    for j, r in enumerate(rows[:-1]):
        steps.append(
            StepRecord(
                int(r["k"]),
                float(r["x_k"]),
                float(r["D_k"]),
                int(r["terms_used"]),
                r["series_status"],
                float(r["lag_gap"]),
                alphas[j] if alphas else 1.0,
            )
        )
    return Trajectory(iterates, steps, TerminalStatus(terminal_status), message)
