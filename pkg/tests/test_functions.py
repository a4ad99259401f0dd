import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracgrad.errors import DomainError
from fracgrad.functions import (
    ConstantOrder,
    EvalPoint,
    Exponential,
    Polynomial,
    RationalPole,
    ShiftedQuadratic,
    SigmoidOrder,
    derivative,
    format_function,
    format_schedule,
    parse_function,
    parse_schedule,
    schedule_alpha,
)

CATALOG = [
    Polynomial((1.0, -2.0, 0.5, 0.25, -0.1)),
    Polynomial((0.0, 0.0, 1.0)),
    Exponential(1.5, -0.7),
    Exponential(-0.4, 1.3),
    RationalPole(-1.0, 1.0),
    RationalPole(2.0, -1.0, 1),
    ShiftedQuadratic(3.0, 0.5),
]


def test_derivative_examples():
    sq = Polynomial((0, 0, 1))
    assert derivative(sq, 1, 3.0) == 6.0
    assert derivative(sq, 3, 123.4) == 0.0
    # d^2/dx^2 of -1/(1-x) is -2/(1-x)^3
    assert derivative(RationalPole(-1, 1), 2, 0.5) == -16.0


def test_rational_pole_closed_form():
    f = RationalPole(-1.0, 1.0)
    for i in range(8):
        for x in (0.1, 0.5, 0.9):
            assert f.derivative(i, x) == pytest.approx(-math.factorial(i) / (1 - x) ** (i + 1), rel=1e-14)


def test_polynomial_degree_exhausted():
    p = Polynomial((3.0, 1.0, 0.0, 2.0, 0.0, 0.0))
    assert p.degree == 3
    for i in range(4, 10):
        assert p.derivative(i, 1.7) == 0.0


def test_domain_error():
    with pytest.raises(DomainError):
        RationalPole(-1.0, 1.0).derivative(0, 1.5)
    with pytest.raises(DomainError):
        RationalPole(-1.0, 1.0).derivative(0, 1.0)


def _sample_points(f, rng, n=100):
    lo, hi = f.domain
    if isinstance(f, RationalPole):
        # stay away from the pole so finite differences resolve the derivative
        if f.side < 0:
            return rng.uniform(hi - 3.0, hi - 0.3, n)
        return rng.uniform(lo + 0.3, lo + 3.0, n)
    return rng.uniform(-2.0, 2.0, n)


@pytest.mark.parametrize("f", CATALOG, ids=format_function)
def test_finite_difference_matches_closed_form(f):
    rng = np.random.default_rng(3)
    h = 1e-5
    for x in _sample_points(f, rng):
        x = float(x)
        for i in range(1, 5):
            fd = (f.derivative(i - 1, x + h) - f.derivative(i - 1, x - h)) / (2 * h)
            exact = f.derivative(i, x)
            assert abs(fd - exact) <= max(1e-6, 1e-6 * abs(exact)), (i, x, fd, exact)


@pytest.mark.parametrize(
    "text",
    ["poly:0,0,1", "const:5", "exp:1.5,-0.7", "pole:-1,1", "pole:2,-1,1", "shiftquad:3", "shiftquad:3,0.5"],
)
def test_descriptor_roundtrip(text):
    f = parse_function(text)
    assert parse_function(format_function(f)) == f


def test_const_is_degree_zero():
    f = parse_function("const:5")
    assert f.degree == 0
    assert f(3.0) == 5.0
    assert f.derivative(1, 3.0) == 0.0


@pytest.mark.parametrize("bad", ["poly", "nope:1", "exp:1", "pole:1,2,3,4", "poly:a,b"])
def test_descriptor_errors(bad):
    with pytest.raises(ValueError):
        parse_function(bad)


def test_schedule_examples():
    assert schedule_alpha(ConstantOrder(0.5), 10.0, -3.0) == 0.5
    s = SigmoidOrder(0.1, 0.9, 0.0, 1.0)
    assert schedule_alpha(s, 0.0, 55.0) == 0.5
    frozen = SigmoidOrder(0.1, 0.9, 0.0, 1.0, EvalPoint.FROZEN, 0.0)
    assert schedule_alpha(frozen, 100.0, 7.0) == 0.5
    at_terminal = SigmoidOrder(0.1, 0.9, 0.0, 1.0, EvalPoint.TERMINAL)
    assert schedule_alpha(at_terminal, 100.0, 0.0) == 0.5


@given(st.floats(-100, 100, allow_nan=False))
def test_schedule_range(x):
    for s in (SigmoidOrder(0.1, 0.9, 0.0, 1.0), SigmoidOrder(0.05, 0.95, 3.0, 40.0), ConstantOrder(0.3)):
        a = schedule_alpha(s, x, 0.0)
        assert 0.0 < a < 1.0


def test_schedule_rejects_bad_bounds():
    with pytest.raises(ValueError):
        ConstantOrder(1.0)
    with pytest.raises(ValueError):
        SigmoidOrder(0.0, 0.5)


@pytest.mark.parametrize(
    "desc,point", [("const:0.5", "current"), ("sigmoid:0.1,0.9,0.0,1.0", "terminal"), ("sigmoid:0.2,0.8", "frozen:1.5")]
)
def test_schedule_roundtrip(desc, point):
    s = parse_schedule(desc, point)
    assert parse_schedule(*format_schedule(s)) == s
