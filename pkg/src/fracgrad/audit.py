"""Numerical audit of the inequality chain used to argue that the
moving-terminal scheme converges to the true extremum.

Along a trajectory, every step k in the tail (k > N) is evaluated on each
link of the chain:

    mu |D_k|                                          (a) step length
  = mu |sum_i a_i(x_k) Delta^(i+1-alpha)|             (c) re-indexed series
  >= mu sigma sum_i Delta^i Delta^(1-alpha)           (d) claimed bound
  =  mu sigma Delta^(1-alpha) / (1 - Delta)           (e) geometric sum
  >= d Delta^(1-alpha),   d = mu sigma / (1 - eps)    (f)

where Delta = |x_k - x_{k-K}| and
a_i(x) = binom(alpha-1, i) f^(i+1)(x) / Gamma(i+2-alpha). sigma is the
supremum of a_i over the tail, taken both as written (signed) and with
absolute values. The absolute form gives the triangle-inequality bound,
which holds in the opposite direction to (d).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import InsufficientTail, NotFound
from .functions import DifferentiableFunction, RationalPole
from .optimize import GRADIENT_STATUS, Algorithm, FractionalConfig, Trajectory, run
from .special_fn import GammaMode, gamma, gen_binomial
from .errors import DomainError

__all__ = [
    "AuditConfig",
    "StepAudit",
    "SigmaReport",
    "AuditReport",
    "shifted_coefficient",
    "audit_trajectory",
    "SigmaSignReport",
    "counterexample_sigma_sign",
    "GeometricWitness",
    "counterexample_geometric",
    "GammaDomainRow",
    "counterexample_gamma_domain",
    "DEFAULT_GEOMETRIC_GRID",
]

# sigma coefficients need binom(alpha-1, i) for i >= 1, whose Gamma form is
# undefined for positive arguments only; the audit always continues them.
_AUDIT_MODE = GammaMode.EXTENDED


@dataclass(frozen=True)
class AuditConfig:
    x_star: float
    claimed_limit: float | None = None  # X; defaults to the last iterate
    epsilon: float | None = None  # defaults to |x_star - X| / 2
    tail_start: int | None = None  # N; derived from the trajectory if None
    i_max: int = 32

    def __post_init__(self):
        if self.i_max < 0:
            raise ValueError("i_max must be >= 0")


def shifted_coefficient(f: DifferentiableFunction, alpha: float, i: int, x: float) -> float:
    """a_i(x) = binom(alpha-1, i) f^(i+1)(x) / Gamma(i+2-alpha)."""
    return gen_binomial(alpha - 1.0, i, _AUDIT_MODE) * f.derivative(i + 1, x) / gamma(i + 2.0 - alpha, _AUDIT_MODE)


@dataclass
class StepAudit:
    k: int
    x_k: float
    delta: float
    lhs_12a: float
    series_12c: float
    direct_sum: float
    bound_12d_paper: float
    bound_12d_corrected: float
    geom_sum_12e: float | None  # None: Delta >= 1, not summable
    bound_12e: float | None
    bound_12f: float
    geometric_ok: bool
    epsilon_ok: bool
    paper_direction_holds: bool
    corrected_direction_holds: bool
    link_12e_12f_holds: bool | None
    tail_below_tol: bool

    def as_row(self) -> dict:
        return asdict(self)


@dataclass
class SigmaReport:
    sigma_paper: float
    sigma_abs: float
    sign_discrepancy: bool
    d_paper: float
    d_abs: float
    argmax_paper: tuple[int, int]  # (k, i)
    argmax_abs: tuple[int, int]
    sup_signed_by_index: list[float] = field(default_factory=list)
    sup_abs_by_index: list[float] = field(default_factory=list)


@dataclass
class AuditReport:
    claimed_limit: float
    x_star: float
    epsilon: float
    tail_start: int
    i_max: int
    alpha: float
    mu: float
    K: int
    slack: float
    steps: list[StepAudit]
    sigma: SigmaReport

    def summary(self) -> dict:
        n = len(self.steps)
        return {
            "audited_steps": n,
            "paper_direction_failures": sum(not s.paper_direction_holds for s in self.steps),
            "corrected_direction_failures": sum(not s.corrected_direction_holds for s in self.steps),
            "geometric_failures": sum(not s.geometric_ok for s in self.steps),
            "epsilon_failures": sum(not s.epsilon_ok for s in self.steps),
            "sign_discrepancy": self.sigma.sign_discrepancy,
        }

    def paper_direction_witnesses(self) -> list[dict]:
        return [
            {"k": s.k, "lhs_12a": s.lhs_12a, "bound_12d_paper": s.bound_12d_paper}
            for s in self.steps
            if not s.paper_direction_holds
        ]


def _d(mu: float, sigma: float, eps: float) -> float:
    denom = 1.0 - eps
    if denom == 0.0:
        return math.copysign(math.inf, sigma) if sigma != 0 else math.nan
    return mu * sigma / denom


def _tail_start(iterates: list[float], X: float, eps: float) -> int:
    if not abs(iterates[-1] - X) < eps:
        raise InsufficientTail(f"last iterate {iterates[-1]!r} is not within {eps!r} of X={X!r}")
    last_bad = None
    for j, x in enumerate(iterates):
        if not abs(x - X) < eps:
            last_bad = j
    return 0 if last_bad is None else last_bad


def audit_trajectory(
    traj: Trajectory,
    f: DifferentiableFunction,
    cfg: FractionalConfig,
    acfg: AuditConfig,
) -> AuditReport:
    """Evaluate every link of the chain on each tail step of an Algo1 run."""
    K = cfg.K
    alpha = cfg.alpha
    mu = cfg.mu
    iterates = traj.iterates
    if len(iterates) < K + 2:
        raise InsufficientTail(f"trajectory has {len(iterates)} iterates; the audit needs at least K+2={K + 2}")
    X = iterates[-1] if acfg.claimed_limit is None else float(acfg.claimed_limit)
    x_star = float(acfg.x_star)
    eps = acfg.epsilon if acfg.epsilon is not None else abs(x_star - X) / 2.0
    if not 0.0 < eps < abs(x_star - X):
        raise ValueError(f"epsilon={eps!r} must satisfy 0 < epsilon < |x_star - X| = {abs(x_star - X)!r}")
    N = acfg.tail_start if acfg.tail_start is not None else _tail_start(iterates, X, eps)

    ks = [
        k
        for k in range(max(N + 1, K), len(traj.steps))
        if traj.steps[k].status != GRADIENT_STATUS
    ]
    if not ks:
        raise InsufficientTail(f"no fractional steps with k > N={N} and k >= K={K}")

    I = acfg.i_max
    coeffs = {}
    for k in ks:
        n = max(I + 1, traj.steps[k].terms_used)
        coeffs[k] = [shifted_coefficient(f, alpha, i, iterates[k]) for i in range(n)]

    sup_signed = [max(coeffs[k][i] for k in ks) for i in range(I + 1)]
    sup_abs = [max(abs(coeffs[k][i]) for k in ks) for i in range(I + 1)]
    sigma_paper = max(sup_signed)
    sigma_abs = max(sup_abs)
    i_p = sup_signed.index(sigma_paper)
    i_a = sup_abs.index(sigma_abs)
    k_p = next(k for k in ks if coeffs[k][i_p] == sigma_paper)
    k_a = next(k for k in ks if abs(coeffs[k][i_a]) == sigma_abs)
    sigma = SigmaReport(
        sigma_paper=sigma_paper,
        sigma_abs=sigma_abs,
        sign_discrepancy=sigma_abs > sigma_paper,
        d_paper=_d(mu, sigma_paper, eps),
        d_abs=_d(mu, sigma_abs, eps),
        argmax_paper=(k_p, i_p),
        argmax_abs=(k_a, i_a),
        sup_signed_by_index=sup_signed,
        sup_abs_by_index=sup_abs,
    )

    abs_tol = cfg.truncation.abs_tol
    slack = mu * I * abs_tol
    steps = []
    for k in ks:
        rec = traj.steps[k]
        delta = abs(iterates[k] - iterates[k - K])
        a = coeffs[k]
        lhs = mu * abs(rec.derivative)
        terms = [a[i] * delta ** (i + 1 - alpha) for i in range(rec.terms_used)]
        series = mu * abs(math.fsum(terms)) if terms else 0.0
        base = delta ** (1.0 - alpha)
        direct = math.fsum(delta**i * base for i in range(I + 1))
        b_paper = mu * sigma_paper * direct
        b_corr = mu * sigma_abs * direct
        if delta < 1.0:
            geom = base / (1.0 - delta)
            b12e = mu * sigma_paper * geom
        else:
            geom = b12e = None
        b12f = sigma.d_paper * base
        tail_ok = all(abs(t) < abs_tol for t in terms[I + 1:])
        steps.append(
            StepAudit(
                k=k,
                x_k=iterates[k],
                delta=delta,
                lhs_12a=lhs,
                series_12c=series,
                direct_sum=direct,
                bound_12d_paper=b_paper,
                bound_12d_corrected=b_corr,
                geom_sum_12e=geom,
                bound_12e=b12e,
                bound_12f=b12f,
                geometric_ok=delta < 1.0,
                epsilon_ok=delta < eps,
                paper_direction_holds=lhs >= b_paper,
                corrected_direction_holds=lhs <= b_corr + slack,
                link_12e_12f_holds=None if b12e is None else b12e >= b12f,
                tail_below_tol=tail_ok,
            )
        )
    return AuditReport(X, x_star, eps, N, I, alpha, mu, K, slack, steps, sigma)


@dataclass
class SigmaSignReport:
    alpha: float
    x_samples: list[float]
    i_max: int
    sigma_paper: float
    sigma_abs: float
    sign_discrepancy: bool
    sigma_paper_leading: float  # sup of a_0 alone over the samples
    index_signs: list[int]  # common sign of a_i over the samples, 0 if mixed
    expected_signs: list[int]  # (-1)^(i+1)
    signs_match: bool
    alternating: bool
    sup_abs_by_index: list[float]
    growth_ratio: float  # sup |a_I| / sup |a_0|
    coefficients: list[list[float]]  # [sample][i]


def counterexample_sigma_sign(
    alpha: float,
    x_range: tuple[float, float] = (0.1, 0.9),
    i_max: int = 32,
    n_samples: int = 9,
) -> SigmaSignReport:
    """Coefficients a_i(x) of the shifted series for f(x) = -1/(1-x)."""
    lo, hi = x_range
    if not 0.0 < lo <= hi < 1.0:
        raise ValueError(f"x_range must lie inside (0, 1), got {x_range!r}")
    f = RationalPole(-1.0, 1.0)
    if n_samples == 1 or lo == hi:
        xs = [lo]
    else:
        xs = [lo + (hi - lo) * j / (n_samples - 1) for j in range(n_samples)]
    table = [[shifted_coefficient(f, alpha, i, x) for i in range(i_max + 1)] for x in xs]
    signs = []
    for i in range(i_max + 1):
        s = {int(math.copysign(1, row[i])) if row[i] != 0 else 0 for row in table}
        signs.append(s.pop() if len(s) == 1 else 0)
    expected = [(-1) ** (i + 1) for i in range(i_max + 1)]
    sup_abs = [max(abs(row[i]) for row in table) for i in range(i_max + 1)]
    flat = [v for row in table for v in row]
    sigma_paper = max(flat)
    sigma_abs = max(abs(v) for v in flat)
    return SigmaSignReport(
        alpha=alpha,
        x_samples=xs,
        i_max=i_max,
        sigma_paper=sigma_paper,
        sigma_abs=sigma_abs,
        sign_discrepancy=sigma_abs > sigma_paper,
        sigma_paper_leading=max(row[0] for row in table),
        index_signs=signs,
        expected_signs=expected,
        signs_match=signs == expected,
        alternating=all(signs[i] == -signs[i + 1] != 0 for i in range(i_max)),
        sup_abs_by_index=sup_abs,
        growth_ratio=sup_abs[-1] / sup_abs[0],
        coefficients=table,
    )


DEFAULT_GEOMETRIC_GRID = {
    "mu": (0.1, 0.5, 1.0, 1.5),
    "x0": (0.5, 1.0, 2.0, 3.0),
    "K": (1, 2),
}


@dataclass
class GeometricWitness:
    mu: float
    x0: float
    K: int
    trajectory: Trajectory
    offending: list[tuple[int, float]]  # (k, Delta) with Delta >= 1


def lag_gaps(traj: Trajectory, K: int) -> list[tuple[int, float]]:
    return [(k, abs(traj.iterates[k] - traj.iterates[k - K])) for k in range(K, len(traj.iterates))]


def counterexample_geometric(
    f: DifferentiableFunction,
    base_cfg: FractionalConfig,
    grid: dict | None = None,
) -> GeometricWitness:
    """First grid point (mu, x0, K), in grid order, whose Algo1 trajectory
    has a lag gap |x_k - x_{k-K}| >= 1."""
    from dataclasses import replace

    grid = grid or DEFAULT_GEOMETRIC_GRID
    for mu in grid["mu"]:
        for x0 in grid["x0"]:
            if not f.in_domain(x0):
                continue
            for K in grid["K"]:
                cfg = replace(base_cfg, mu=mu, x0=x0, K=K)
                traj = run(f, cfg, Algorithm.ALGO1)
                bad = [(k, d) for k, d in lag_gaps(traj, K) if d >= 1.0]
                if bad:
                    return GeometricWitness(mu, x0, K, traj, bad)
    raise NotFound("no trajectory on the grid has a lag gap >= 1")


@dataclass
class GammaDomainRow:
    i: int
    gamma_argument: float
    strict_error: str | None
    extended_value: float


def counterexample_gamma_domain(alpha: float, indices: range = range(2, 7)) -> list[GammaDomainRow]:
    """binom(alpha-1, i-1) for the variable-order series: the Gamma argument
    alpha - i + 1 of its denominator is <= 0 for every i >= 2."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    rows = []
    for i in indices:
        try:
            gen_binomial(alpha - 1.0, i - 1, GammaMode.STRICT)
            err = None
        except DomainError as exc:
            err = str(exc)
        rows.append(GammaDomainRow(i, alpha - i + 1.0, err, gen_binomial(alpha - 1.0, i - 1, GammaMode.EXTENDED)))
    return rows
