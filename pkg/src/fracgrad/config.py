"""Flat ``key = value`` experiment configs.

One assignment per line; strings are double-quoted, lists are
comma-separated, ``#`` starts a comment line. Unset optional keys are
simply absent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from .audit import AuditConfig
from .caputo import TruncationPolicy
from .functions import DifferentiableFunction, parse_function, parse_schedule
from .optimize import Algorithm, FractionalConfig, StopRule, TerminalPolicy, Warmup
from .special_fn import GammaMode, default_mode

__all__ = ["ExperimentConfig", "parse_config", "format_config", "load_config"]


def _default_mode_name() -> str:
    return default_mode().value


@dataclass
class ExperimentConfig:
    function: str = "shiftquad:3.0,1.0"
    algorithm: str = "algo1"
    alpha: float = 0.5
    schedule: str = ""
    alpha_eval: str = "current"
    mu: float = 0.1
    K: int = 1
    c: float = 0.0
    x0: float = 0.0
    warmup: str = "gd_bootstrap"
    terminal_policy: str = "symmetric"
    abs_tol: float = 1e-14
    max_terms: int = 64
    divergence_window: int = 8
    gamma_mode: str = field(default_factory=_default_mode_name)
    step_tol: float = 1e-10
    max_iters: int = 1000
    x_star: float | None = None
    claimed_limit: float | None = None
    epsilon: float | None = None
    tail_start: int | None = None
    i_max: int = 32
    output: str = "trajectory"
    formats: list[str] = field(default_factory=lambda: ["csv", "json"])

    def make_function(self) -> DifferentiableFunction:
        return parse_function(self.function)

    def make_algorithm(self) -> Algorithm:
        return Algorithm(self.algorithm)

    def make_fractional_config(self) -> FractionalConfig:
        schedule = parse_schedule(self.schedule, self.alpha_eval) if self.schedule else None
        return FractionalConfig(
            alpha=self.alpha,
            mu=self.mu,
            K=self.K,
            x0=self.x0,
            c=self.c,
            schedule=schedule,
            warmup=Warmup(self.warmup),
            terminal_policy=TerminalPolicy(self.terminal_policy),
            truncation=TruncationPolicy(self.abs_tol, self.max_terms, self.divergence_window),
            gamma_mode=GammaMode.parse(self.gamma_mode),
            stop=StopRule(self.step_tol, self.max_iters),
        )

    def make_audit_config(self, f: DifferentiableFunction | None = None) -> AuditConfig:
        x_star = self.x_star
        if x_star is None and f is not None:
            x_star = f.extremum
        if x_star is None:
            raise ValueError("audit needs x_star: set it in the config or pass --x-star")
        return AuditConfig(x_star, self.claimed_limit, self.epsilon, self.tail_start, self.i_max)

    def validate(self) -> None:
        self.make_function()
        self.make_algorithm()
        self.make_fractional_config()
        bad = set(self.formats) - {"csv", "json"}
        if bad or not self.formats:
            raise ValueError(f"formats must be a non-empty subset of csv,json; got {self.formats}")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_INT = {"K", "max_terms", "divergence_window", "max_iters", "i_max", "tail_start"}
_FLOAT = {"alpha", "mu", "c", "x0", "abs_tol", "step_tol", "x_star", "claimed_limit", "epsilon"}
_LIST = {"formats"}
_KEYS = [f.name for f in fields(ExperimentConfig)]


def _convert(key: str, raw: str):
    if raw.startswith('"'):
        value = json.loads(raw)
        if not isinstance(value, str):
            raise ValueError(f"{key}: malformed quoted string {raw!r}")
        if key in _INT | _FLOAT | _LIST:
            raise ValueError(f"{key}: expected a number or list, got a string")
        return value
    if key in _INT:
        return int(raw)
    if key in _FLOAT:
        return float(raw)
    if key in _LIST:
        return [p.strip() for p in raw.split(",") if p.strip()]
    raise ValueError(f"{key}: string values must be double-quoted, got {raw!r}")


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        if key not in _KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def format_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key in _KEYS:
        value = getattr(cfg, key)
        if value is None:
            continue
        if key in _LIST:
            text = ", ".join(value)
        elif key in _INT:
            text = str(int(value))
        elif key in _FLOAT:
            text = repr(float(value))
        else:
            text = json.dumps(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
