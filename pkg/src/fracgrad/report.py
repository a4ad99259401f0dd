"""File formats: trajectory CSV + JSON sidecar, audit CSV + JSON."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, fields
from pathlib import Path

from .audit import AuditReport, StepAudit
from .config import ExperimentConfig
from .optimize import Algorithm, Trajectory, trajectory_from_csv, trajectory_to_csv

__all__ = [
    "dumps",
    "trajectory_sidecar",
    "write_trajectory",
    "load_trajectory",
    "audit_to_csv",
    "audit_to_dict",
    "write_audit",
]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def trajectory_sidecar(traj: Trajectory, cfg: ExperimentConfig) -> dict:
    out = {
        "config": cfg.as_dict(),
        "algorithm": cfg.algorithm,
        "terminal_status": traj.terminal_status.value,
        "message": traj.message,
        "steps": len(traj.steps),
        "final_iterate": traj.final,
        # alpha = 1 is outside 0 < alpha < 1, kept only as the GD baseline
        "integer_order_extension": cfg.algorithm == Algorithm.ALGO1.value and cfg.alpha == 1.0,
    }
    if cfg.algorithm == Algorithm.ALGO3.value:
        out["step_alpha"] = [s.alpha for s in traj.steps]
    return out


def write_trajectory(traj: Trajectory, cfg: ExperimentConfig, stem: str | Path) -> list[Path]:
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in cfg.formats:
        p = stem.with_suffix(".csv")
        p.write_text(trajectory_to_csv(traj), encoding="utf-8", newline="")
        written.append(p)
    # the sidecar is always written: the audit needs the config echo
    p = stem.with_suffix(".json")
    p.write_text(dumps(trajectory_sidecar(traj, cfg)), encoding="utf-8", newline="")
    written.append(p)
    return written


def load_trajectory(path: str | Path) -> tuple[Trajectory, ExperimentConfig]:
    """Load from either the CSV or the JSON sidecar path."""
    path = Path(path)
    csv_path, json_path = path.with_suffix(".csv"), path.with_suffix(".json")
    meta = json.loads(json_path.read_text(encoding="utf-8"))
    cfg = ExperimentConfig(**meta["config"])
    cfg.validate()
    traj = trajectory_from_csv(
        csv_path.read_text(encoding="utf-8"),
        meta["terminal_status"],
        meta.get("message", ""),
        meta.get("step_alpha"),
    )
    return traj, cfg


def _cell(v) -> str:
    if v is None:
        return "NotSummable"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


AUDIT_COLUMNS = tuple(f.name for f in fields(StepAudit))


def audit_to_csv(report: AuditReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AUDIT_COLUMNS)
    for s in report.steps:
        w.writerow([_cell(getattr(s, c)) for c in AUDIT_COLUMNS])
    return buf.getvalue()


def audit_to_dict(report: AuditReport) -> dict:
    sigma = asdict(report.sigma)
    return {
        "claimed_limit": report.claimed_limit,
        "x_star": report.x_star,
        "epsilon": report.epsilon,
        "tail_start": report.tail_start,
        "i_max": report.i_max,
        "alpha": report.alpha,
        "mu": report.mu,
        "K": report.K,
        "slack": report.slack,
        "summary": report.summary(),
        "sigma": sigma,
        "paper_direction_witnesses": report.paper_direction_witnesses(),
        "steps": [s.as_row() for s in report.steps],
    }


def write_audit(report: AuditReport, stem: str | Path, formats=("csv", "json")) -> list[Path]:
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = stem.with_suffix(".csv")
        p.write_text(audit_to_csv(report), encoding="utf-8", newline="")
        written.append(p)
    if "json" in formats:
        p = stem.with_suffix(".json")
        p.write_text(dumps(audit_to_dict(report)), encoding="utf-8", newline="")
        written.append(p)
    return written
