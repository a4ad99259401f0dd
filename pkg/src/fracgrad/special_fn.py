"""Real Gamma function and generalized binomial coefficient.

Two domain policies are supported. ``GammaMode.STRICT`` accepts only
positive arguments, i.e. exactly the range where the Euler integral
``int_0^inf e^-t t^(x-1) dt`` converges. ``GammaMode.EXTENDED`` continues
Gamma to every real argument except the poles at 0, -1, -2, ...
"""

from __future__ import annotations

import enum
import functools
import math
import os
from fractions import Fraction

from .errors import DomainError, DomainReason, GammaOverflowError

__all__ = [
    "GammaMode",
    "check_gamma_argument",
    "gamma",
    "gen_binomial",
    "default_mode",
    "sinpi",
]


class GammaMode(enum.Enum):
    STRICT = "strict"
    EXTENDED = "extended"

    @classmethod
    def parse(cls, value: "str | GammaMode") -> "GammaMode":
        if isinstance(value, GammaMode):
            return value
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown gamma mode {value!r}; expected 'strict' or 'extended'") from None


def default_mode() -> GammaMode:
    """Mode used when none is given; ``FRACGRAD_GAMMA_MODE`` overrides it."""
    return GammaMode.parse(os.environ.get("FRACGRAD_GAMMA_MODE", "extended"))


# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_PI = math.sqrt(math.pi)

# Gamma(n) = (n-1)! is exact in double precision only up to n = 23, but the
# correctly rounded factorial is still the best answer up to the overflow
# threshold.
_FACTORIAL_MAX_ARG = 171
_FACTORIALS = tuple(float(math.factorial(n - 1)) for n in range(1, _FACTORIAL_MAX_ARG + 1))

_HALF_MAX = 170


@functools.lru_cache(maxsize=None)
def _half_integer_gamma(n: int) -> float:
    # Gamma(n + 1/2) = sqrt(pi) (2n)! / (4^n n!) and
    # Gamma(1/2 - n) = sqrt(pi) (-4)^n n! / (2n)!
    if n >= 0:
        ratio = Fraction(math.factorial(2 * n), 4**n * math.factorial(n))
    else:
        m = -n
        ratio = Fraction((-4) ** m * math.factorial(m), math.factorial(2 * m))
    return float(ratio) * _SQRT_PI


def sinpi(x: float) -> float:
    """sin(pi * x) with exact argument reduction."""
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    if r == 0.0:
        return 0.0
    return math.sin(math.pi * r)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def check_gamma_argument(x: float, mode: GammaMode) -> None:
    """Raise ``DomainError`` if Gamma(x) is not defined under ``mode``."""
    if not math.isfinite(x):
        raise DomainError(DomainReason.POLE if mode is GammaMode.EXTENDED else DomainReason.STRICT_NON_POSITIVE,
                          x, f"Gamma argument {x!r} is not finite")
    if mode is GammaMode.STRICT:
        if x <= 0.0:
            raise DomainError(
                DomainReason.STRICT_NON_POSITIVE,
                x,
                f"Gamma({x!r}) is undefined in strict mode (argument must be > 0)",
            )
    elif _is_nonpositive_integer(x):
        raise DomainError(DomainReason.POLE, x, f"Gamma({x!r}) is a pole")


def _lanczos(x: float) -> float:
    # valid for x >= 0.5
    z = x - 1.0
    s = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        s += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z+0.5) does not overflow before exp(-t) scales it
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_2PI * s * half * math.exp(-t) * half


def gamma(x: float, mode: GammaMode | None = None) -> float:
    """Gamma(x) for real ``x`` under the given domain policy.

    Positive integers up to 171 return the correctly rounded factorial and
    half-integers use the closed form in sqrt(pi). Other arguments below
    0.5 go through the reflection formula.
    """
    if mode is None:
        mode = default_mode()
    x = float(x)
    check_gamma_argument(x, mode)
    if x == math.floor(x) and 1.0 <= x <= _FACTORIAL_MAX_ARG:
        return _FACTORIALS[int(x) - 1]
    twice = 2.0 * x
    if twice == math.floor(twice) and abs(x) <= _HALF_MAX:
        # x = n + 1/2
        return _half_integer_gamma(int(math.floor(x)))
    if x >= 0.5:
        try:
            value = _lanczos(x)
        except OverflowError:
            raise GammaOverflowError(x) from None
    else:
        try:
            other = _lanczos(1.0 - x)
        except OverflowError:
            # |Gamma(1 - x)| overflows, so |Gamma(x)| underflows
            other = math.inf
        value = math.pi / (sinpi(x) * other)
    if not math.isfinite(value):
        raise GammaOverflowError(x)
    return value


def gen_binomial(p: float, q: int, mode: GammaMode | None = None) -> float:
    """Generalized binomial coefficient Gamma(p+1) / (Gamma(q+1) Gamma(p-q+1)).

    The value is always computed as the falling-factorial product
    ``p (p-1) ... (p-q+1) / q!``, which is the analytic continuation of the
    Gamma ratio: it is exactly 0 when only the denominator Gamma sits at a
    pole. In strict mode every Gamma argument of the defining ratio must be
    positive, otherwise ``DomainError`` names the first offending argument.
    """
    if mode is None:
        mode = default_mode()
    if isinstance(q, float):
        if q != math.floor(q):
            raise ValueError(f"lower argument must be an integer, got {q!r}")
        q = int(q)
    if q < 0:
        raise ValueError(f"lower argument must be non-negative, got {q!r}")
    p = float(p)
    if not math.isfinite(p):
        raise ValueError(f"upper argument must be finite, got {p!r}")
    if mode is GammaMode.STRICT:
        for arg in (p + 1.0, float(q + 1), p - q + 1.0):
            check_gamma_argument(arg, mode)
    value = 1.0
    for j in range(q):
        value *= (p - j) / (j + 1)
    return value
