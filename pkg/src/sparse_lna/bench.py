"""Sweep harness: instance generation, per-trial solves, aggregation, output.

Trial ``t`` of every grid point uses seed ``seed_base + t``, so a grid point
and a trial index fully determine the instance and the record.
"""
import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .problems.cs import SensingSetup, generate, recovery_success
from .problems.portfolio import MvskInstance, lambdas_from_xi, sparsity_hat, synthetic_panel
from .solver import SolverConfig, Status, solve

FAMILIES = ("cs_gaussian", "cs_dct", "mvsk")


class PlanError(ValueError):
    pass


@dataclass
class ExperimentPlan:
    family: str
    grid: list
    trials: int = 100
    seed_base: int = 0
    beta_policy: object = "paper_default"
    output_path: str | None = None
    epsilon: float = 1e-6
    max_iter: int = 1000
    workers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PlanError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.trials < 1:
            raise PlanError("trials must be at least 1")
        if not self.grid:
            raise PlanError("grid must not be empty")
        if self.beta_policy == "column_scaled" and self.family == "mvsk":
            raise PlanError("column_scaled applies to the CS families only")
        if self.beta_policy not in ("paper_default", "column_scaled"):
            try:
                beta = float(self.beta_policy)
            except (TypeError, ValueError):
                raise PlanError(
                    f"beta_policy must be 'paper_default', 'column_scaled' or a number, got {self.beta_policy!r}"
                )
            if not beta > 0:
                raise PlanError("explicit beta must be positive")
        self.grid = [resolve_point(self.family, dict(pt)) for pt in self.grid]

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise PlanError(f"{path}: plan must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise PlanError(f"unknown plan fields: {sorted(extra)}")
        missing = {"family", "grid"} - set(data)
        if missing:
            raise PlanError(f"plan lacks required fields: {sorted(missing)}")
        return cls(**data)

    def beta_for(self, point):
        """Step parameter for a grid point.

        ``paper_default`` is 5/n for CS and 1 for MVSK.  ``column_scaled`` is
        5p/n, the same step measured against unit-norm sensing columns
        (raw Gaussian columns have squared norm about p).
        """
        if self.beta_policy == "paper_default":
            return 1.0 if self.family == "mvsk" else 5.0 / point["n"]
        if self.beta_policy == "column_scaled":
            return 5.0 * point["p"] / point["n"]
        return float(self.beta_policy)


def _ceil(v):
    return math.ceil(round(v, 9))


def resolve_point(family, pt):
    """Fill derived coordinates: ``p`` from ``r``, ``s`` from ``s_frac``."""
    if "n" not in pt:
        raise PlanError(f"grid point {pt} lacks n")
    n = int(pt["n"])
    if "s" not in pt:
        if "s_frac" not in pt:
            raise PlanError(f"grid point {pt} needs s or s_frac")
        pt["s"] = _ceil(pt["s_frac"] * n)
    if family == "mvsk":
        pt.setdefault("xi", 5.0)
        pt.setdefault("t_obs", 500)
    else:
        if "p" not in pt:
            if "r" not in pt:
                raise PlanError(f"grid point {pt} needs p or r")
            pt["p"] = _ceil(pt["r"] * n)
    return pt


def point_key(point):
    return ",".join(f"{k}={point[k]}" for k in sorted(point))


@dataclass
class TrialRecord:
    family: str
    n: int
    p: int | None
    m: int
    s: int
    xi: float | None
    trial: int
    seed: int
    status: str
    iterations: int
    eta_final: float
    abs_error: float | None
    success: bool | None
    s_hat: int | None
    f_value: float | None
    wall_time: float | None


CSV_COLUMNS = [f.name for f in fields(TrialRecord)]
_FIELD_TYPES = {
    "n": int, "p": int, "m": int, "s": int, "trial": int, "seed": int, "iterations": int, "s_hat": int,
    "xi": float, "eta_final": float, "abs_error": float, "f_value": float, "wall_time": float,
}


def trial_instance(family, point, seed):
    if family == "mvsk":
        panel = synthetic_panel(point["n"], point["t_obs"], seed)
        return MvskInstance.from_panel(panel, lambdas_from_xi(point["xi"]), point["s"])
    kind = "gaussian" if family == "cs_gaussian" else "dct"
    return generate(SensingSetup(point["n"], point["p"], point["s"], kind, seed))


def run_trial(plan, point, t, return_report=False):
    seed = plan.seed_base + t
    inst = trial_instance(plan.family, point, seed)
    cfg = SolverConfig(
        beta=plan.beta_for(point), epsilon=plan.epsilon, max_iter=plan.max_iter,
        keep_iterates=return_report,
    )
    report = solve(inst, cfg=cfg)
    x = report.final.x
    abs_error = success = s_hat = f_value = None
    if plan.family == "mvsk":
        f_value = float(inst.f(x))
        s_hat = sparsity_hat(x) if np.any(x) else 0
    else:
        abs_error = float(np.linalg.norm(x - inst.x_true))
        success = recovery_success(x, inst.x_true)
    rec = TrialRecord(
        family=plan.family, n=inst.n, p=point.get("p"), m=inst.m, s=inst.s,
        xi=point.get("xi"), trial=t, seed=seed, status=report.status.value,
        iterations=report.iterations, eta_final=float(report.eta_final),
        abs_error=abs_error, success=success, s_hat=s_hat, f_value=f_value,
        wall_time=report.wall_time,
    )
    if return_report:
        return rec, report, inst
    return rec


def _run_task(args):
    plan, gi, t = args
    return gi, t, run_trial(plan, plan.grid[gi], t)


def run_plan(plan):
    """Run every (grid point, trial) pair; returns ``(records, summary)``.

    Records are ordered by grid point then trial index regardless of
    ``workers``.
    """
    tasks = [(plan, gi, t) for gi in range(len(plan.grid)) for t in range(plan.trials)]
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=4))
    else:
        results = [_run_task(task) for task in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    records = [r[2] for r in results]
    return records, summarize(plan, records)


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def summarize(plan, records, timing=True):
    if len(records) != len(plan.grid) * plan.trials:
        raise ValueError("summarize expects the full, ordered record list of run_plan")
    summary = {}
    per_point = plan.trials
    for gi, point in enumerate(plan.grid):
        recs = records[gi * per_point:(gi + 1) * per_point]
        entry = {
            "point": point,
            "trials": len(recs),
            "converged": sum(r.status == Status.CONVERGED.value for r in recs),
            "mean_iterations": _mean([r.iterations for r in recs]),
        }
        if timing:
            entry["mean_wall_time"] = _mean([r.wall_time for r in recs])
        if plan.family == "mvsk":
            entry["mean_f_value"] = _mean([r.f_value for r in recs])
            entry["mean_s_hat"] = _mean([r.s_hat for r in recs])
        else:
            wins = [r for r in recs if r.success]
            entry["success_rate"] = len(wins) / len(recs) if recs else None
            entry["mean_abs_error"] = _mean([r.abs_error for r in recs])
            entry["mean_abs_error_success"] = _mean([r.abs_error for r in wins])
        summary[point_key(point)] = entry
    return summary


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def emit_csv(records, path, timing=True):
    """Write records with the fixed ``CSV_COLUMNS`` header (UTF-8, LF).

    With ``timing=False`` the ``wall_time`` column is left empty so repeated
    runs produce byte-identical files.
    """
    if not records:
        raise ValueError("no records to write")
    rows = []
    for rec in records:
        row = asdict(rec)
        if not timing:
            row["wall_time"] = None
        rows.append([_fmt(row[c]) for c in CSV_COLUMNS])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)


def _parse(name, text):
    if text == "":
        return None
    if name == "success":
        return text == "true"
    conv = _FIELD_TYPES.get(name)
    return conv(text) if conv else text


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        return [TrialRecord(**{c: _parse(c, v) for c, v in zip(header, row)}) for row in reader]


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def emit_json(summary, path):
    if not summary:
        raise ValueError("empty summary")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_json_safe(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def output_paths(plan, override=None):
    base = override or plan.output_path or f"{plan.family}_sweep.csv"
    root, ext = os.path.splitext(base)
    return (base if ext else base + ".csv"), root + "_summary.json"
