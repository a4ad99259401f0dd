"""Exception types shared across the package."""

from __future__ import annotations

import enum


class DomainReason(enum.Enum):
    STRICT_NON_POSITIVE = "StrictNonPositive"
    POLE = "Pole"
    OUTSIDE_FUNCTION_DOMAIN = "OutsideFunctionDomain"
    TERMINAL_ORDER = "TerminalOrder"


class DomainError(ValueError):
    """An argument lies outside the domain of the quantity being evaluated.

    ``argument`` carries the offending value (e.g. the Gamma argument) so
    callers can report it.
    """

    def __init__(self, reason: DomainReason, argument: float, message: str | None = None):
        self.reason = reason
        self.argument = argument
        if message is None:
            message = f"{reason.value}: argument {argument!r}"
        super().__init__(message)


class TerminalOrderError(DomainError):
    """Raised when the upper limit does not exceed the lower terminal."""

    def __init__(self, x: float, terminal: float):
        self.x = x
        self.terminal = terminal
        super().__init__(
            DomainReason.TERMINAL_ORDER,
            x - terminal,
            f"upper limit {x!r} does not exceed lower terminal {terminal!r}",
        )


class GammaOverflowError(OverflowError):
    """|Gamma(x)| is not representable as a finite double."""

    def __init__(self, argument: float):
        self.argument = argument
        super().__init__(f"Gamma({argument!r}) overflows double precision")


class InsufficientTail(ValueError):
    """No tail of the trajectory stays within epsilon of the claimed limit."""


class NotFound(LookupError):
    """A counterexample grid was exhausted without producing a witness."""
