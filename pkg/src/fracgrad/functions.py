"""Test functions with closed-form derivatives of every order, and
fractional-order schedules.

Functions are described structurally (kind + parameters) so that
``f.derivative(i, x)`` is exact for all ``i``. The textual descriptor
form, e.g. ``poly:0,0,1`` or ``pole:-1,1``, is what config files and the
CLI use; ``parse_function`` and ``format_function`` round-trip it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, DomainReason

__all__ = [
    "DifferentiableFunction",
    "Polynomial",
    "Exponential",
    "RationalPole",
    "ShiftedQuadratic",
    "derivative",
    "parse_function",
    "format_function",
    "EvalPoint",
    "ConstantOrder",
    "SigmoidOrder",
    "OrderSchedule",
    "schedule_alpha",
    "parse_schedule",
    "format_schedule",
]


def _num(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class DifferentiableFunction:
    """Base class; subclasses implement ``_derivative``.

    ``lower``/``upper`` bound the open interval on which the function is
    analytic.
    """

    def _derivative(self, i: int, x: float) -> float:
        raise NotImplementedError

    @property
    def domain(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def degree(self) -> int | None:
        """Polynomial degree, or None when the function is not a polynomial."""
        return None

    @property
    def extremum(self) -> float | None:
        """Location of the unique stationary point, when known in closed form."""
        return None

    def in_domain(self, x: float) -> bool:
        lo, hi = self.domain
        return lo < x < hi

    def derivative(self, i: int, x: float) -> float:
        if i < 0:
            raise ValueError(f"derivative order must be >= 0, got {i}")
        if not self.in_domain(x):
            raise DomainError(
                DomainReason.OUTSIDE_FUNCTION_DOMAIN,
                x,
                f"x={x!r} outside the domain {self.domain} of {format_function(self)}",
            )
        return self._derivative(i, x)

    def __call__(self, x: float) -> float:
        return self.derivative(0, x)


@dataclass(frozen=True)
class Polynomial(DifferentiableFunction):
    coeffs: tuple[float, ...]  # ascending degree

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        # trailing zeros carry no information and would inflate the degree
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if not coeffs:
            coeffs = (0.0,)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def extremum(self) -> float | None:
        if self.degree == 2:
            return -self.coeffs[1] / (2.0 * self.coeffs[2])
        return None

    def _derivative(self, i: int, x: float) -> float:
        n = self.degree
        if i > n:
            return 0.0
        # Horner on the coefficients of the i-th derivative
        acc = 0.0
        for k in range(n, i - 1, -1):
            acc = acc * x + self.coeffs[k] * (math.factorial(k) // math.factorial(k - i))
        return acc


@dataclass(frozen=True)
class Exponential(DifferentiableFunction):
    """a * exp(b x)"""

    a: float
    b: float

    def _derivative(self, i: int, x: float) -> float:
        return self.a * self.b**i * math.exp(self.b * x)


@dataclass(frozen=True)
class RationalPole(DifferentiableFunction):
    """s / (r - x) on one side of the pole at r.

    The i-th derivative is ``s * i! / (r - x)**(i+1)``. ``side`` picks the
    branch: ``-1`` is (-inf, r), ``+1`` is (r, inf).
    """

    s: float
    r: float
    side: int = -1

    def __post_init__(self):
        if self.side not in (-1, 1):
            raise ValueError(f"side must be -1 or +1, got {self.side!r}")

    @property
    def domain(self) -> tuple[float, float]:
        return (-math.inf, self.r) if self.side < 0 else (self.r, math.inf)

    def _derivative(self, i: int, x: float) -> float:
        return self.s * math.factorial(i) / (self.r - x) ** (i + 1)


@dataclass(frozen=True)
class ShiftedQuadratic(DifferentiableFunction):
    """scale * (x - x_star)**2"""

    x_star: float
    scale: float = 1.0

    @property
    def degree(self) -> int:
        return 2 if self.scale != 0.0 else 0

    @property
    def extremum(self) -> float:
        return self.x_star

    def _derivative(self, i: int, x: float) -> float:
        if i == 0:
            return self.scale * (x - self.x_star) ** 2
        if i == 1:
            return 2.0 * self.scale * (x - self.x_star)
        if i == 2:
            return 2.0 * self.scale
        return 0.0


def derivative(f: DifferentiableFunction, i: int, x: float) -> float:
    """Exact i-th derivative of ``f`` at ``x``; ``i = 0`` is f(x)."""
    return f.derivative(i, x)


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    return [float(t) for t in text.split(",")]


def parse_function(descriptor: str) -> DifferentiableFunction:
    """Parse ``kind:params``.

    Kinds: ``poly:c0,c1,...``, ``const:c``, ``exp:a,b``,
    ``pole:s,r[,side]``, ``shiftquad:x_star[,scale]``.
    """
    kind, sep, rest = descriptor.strip().partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise ValueError(f"function descriptor {descriptor!r} lacks 'kind:' prefix")
    args = _floats(rest)
    try:
        if kind in ("poly", "polynomial"):
            if not args:
                raise ValueError("poly needs at least one coefficient")
            return Polynomial(tuple(args))
        if kind == "const":
            (c,) = args
            return Polynomial((c,))
        if kind == "exp":
            a, b = args
            return Exponential(a, b)
        if kind == "pole":
            if len(args) == 2:
                return RationalPole(args[0], args[1])
            s, r, side = args
            return RationalPole(s, r, int(side))
        if kind == "shiftquad":
            return ShiftedQuadratic(*args)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad parameters in function descriptor {descriptor!r}: {exc}") from None
    raise ValueError(f"unknown function kind {kind!r} in {descriptor!r}")


def format_function(f: DifferentiableFunction) -> str:
    if isinstance(f, Polynomial):
        return "poly:" + ",".join(_num(c) for c in f.coeffs)
    if isinstance(f, Exponential):
        return f"exp:{_num(f.a)},{_num(f.b)}"
    if isinstance(f, RationalPole):
        return f"pole:{_num(f.s)},{_num(f.r)},{f.side}"
    if isinstance(f, ShiftedQuadratic):
        return f"shiftquad:{_num(f.x_star)},{_num(f.scale)}"
    raise TypeError(f"cannot format {type(f).__name__}")


class EvalPoint(enum.Enum):
    """Where a state-dependent order is evaluated during one step."""

    CURRENT = "current"
    TERMINAL = "terminal"
    FROZEN = "frozen"


@dataclass(frozen=True)
class ConstantOrder:
    alpha: float
    eval_point: EvalPoint = EvalPoint.CURRENT
    frozen_at: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"order must lie in (0, 1), got {self.alpha!r}")

    def value(self, x: float) -> float:
        return self.alpha


@dataclass(frozen=True)
class SigmoidOrder:
    """alpha_min + (alpha_max - alpha_min) * logistic(slope * (x - center))."""

    alpha_min: float
    alpha_max: float
    center: float = 0.0
    slope: float = 1.0
    eval_point: EvalPoint = EvalPoint.CURRENT
    frozen_at: float = 0.0

    def __post_init__(self):
        for a in (self.alpha_min, self.alpha_max):
            if not 0.0 < a < 1.0:
                raise ValueError(f"order bounds must lie in (0, 1), got {a!r}")

    def value(self, x: float) -> float:
        z = self.slope * (x - self.center)
        if z >= 0:
            s = 1.0 / (1.0 + math.exp(-z))
        else:
            e = math.exp(z)
            s = e / (1.0 + e)
        return self.alpha_min + (self.alpha_max - self.alpha_min) * s


OrderSchedule = ConstantOrder | SigmoidOrder


def schedule_alpha(s: OrderSchedule, x_current: float, x_terminal: float) -> float:
    """Order used for one step, evaluated at the point the policy names."""
    if s.eval_point is EvalPoint.CURRENT:
        x = x_current
    elif s.eval_point is EvalPoint.TERMINAL:
        x = x_terminal
    else:
        x = s.frozen_at
    return s.value(x)


def _parse_eval_point(text: str) -> tuple[EvalPoint, float]:
    text = text.strip().lower()
    if text.startswith("frozen"):
        _, _, at = text.partition(":")
        return EvalPoint.FROZEN, float(at) if at else 0.0
    return EvalPoint(text), 0.0


def parse_schedule(descriptor: str, eval_point: str = "current") -> OrderSchedule:
    """Parse ``const:alpha`` or ``sigmoid:min,max[,center[,slope]]``.

    ``eval_point`` is ``current``, ``terminal`` or ``frozen:x0``.
    """
    point, at = _parse_eval_point(eval_point)
    kind, _, rest = descriptor.strip().partition(":")
    args = _floats(rest)
    if kind == "const":
        (alpha,) = args
        return ConstantOrder(alpha, point, at)
    if kind == "sigmoid":
        if len(args) < 2:
            raise ValueError("sigmoid schedule needs at least min,max")
        return SigmoidOrder(*args, eval_point=point, frozen_at=at)
    raise ValueError(f"unknown schedule kind {kind!r}")


def format_schedule(s: OrderSchedule) -> tuple[str, str]:
    """Inverse of ``parse_schedule``: returns (descriptor, eval_point)."""
    if isinstance(s, ConstantOrder):
        desc = f"const:{_num(s.alpha)}"
    else:
        desc = f"sigmoid:{_num(s.alpha_min)},{_num(s.alpha_max)},{_num(s.center)},{_num(s.slope)}"
    point = s.eval_point.value
    if s.eval_point is EvalPoint.FROZEN:
        point = f"frozen:{_num(s.frozen_at)}"
    return desc, point
