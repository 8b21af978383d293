"""Seeded batch experiments: configuration, execution and serialization."""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ConfigError, RunAborted
from .optimizer import ALGORITHMS, RunConfig, RunHistory, RunResult, run
from .problems import PROBLEMS, get_problem

log = logging.getLogger(__name__)

DEFAULT_SEEDS = tuple(range(10))
_RUN_FIELDS = {f.name for f in fields(RunConfig)} - {"seed", "algorithm"}


@dataclass
class ExperimentConfig:
    problem: str
    algorithm: str
    seeds: list[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    run: RunConfig = field(default_factory=RunConfig)
    output_dir: Path = Path("results")
    fail_after: int | None = None  # failure injection, see SyntheticProblem

    def run_config(self, seed: int) -> RunConfig:
        return RunConfig(**{**asdict(self.run), "seed": seed, "algorithm": self.algorithm})

    def to_dict(self) -> dict:
        out = {"problem": self.problem, "algorithm": self.algorithm, "seeds": list(self.seeds)}
        out.update({k: v for k, v in asdict(self.run).items() if k in _RUN_FIELDS})
        out["output_dir"] = str(self.output_dir)
        out["fail_after"] = self.fail_after
        return out


_INT_KEYS = {"n_init_per_source", "max_evaluations", "n_starts", "acq_maxiter", "fail_after"}
_FLOAT_KEYS = {"m", "delta_min", "budget", "beta_delta"}
_OPTIONAL_KEYS = {"delta_min", "budget", "fail_after"}
_KNOWN_KEYS = {"problem", "algorithm", "seeds", "seed", "output_dir"} | _RUN_FIELDS | {"fail_after"}


def _coerce(key, value):
    if value is None:
        if key in _OPTIONAL_KEYS:
            return None
        raise ConfigError("must not be null", key)
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key)
        return value
    if key in _FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", key)
        if not math.isfinite(value):
            raise ConfigError("must be finite", key)
        return float(value)
    if key == "cost_log_transform":
        if not isinstance(value, bool):
            raise ConfigError(f"expected true or false, got {value!r}", key)
        return value
    if key in ("problem", "algorithm", "cost_scaling", "output_dir"):
        if not isinstance(value, str) or not value:
            raise ConfigError(f"expected a non-empty string, got {value!r}", key)
        return value
    if key == "seeds":
        if not isinstance(value, list) or not value or not all(
            isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in value
        ):
            raise ConfigError("expected a non-empty list of non-negative integers", key)
        if len(set(value)) != len(value):
            raise ConfigError("seeds must be distinct", key)
        return list(value)
    if key == "seed":
        return _coerce("seeds", [value])
    raise ConfigError("unknown configuration key", key)


def parse_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Build a validated config from a flat JSON file and/or overriding values.

    Values in ``overrides`` that are not ``None`` win over the file. A
    ``seed`` override replaces the whole seed list.
    """
    raw: dict = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"file not found: {p}", "config")
        try:
            raw = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}", "config") from None
        if not isinstance(raw, dict):
            raise ConfigError("top level must be a JSON object", "config")
        if "seed" in raw and "seeds" in raw:
            raise ConfigError("give either seed or seeds, not both", "seeds")

    merged = dict(raw)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "seed":
            merged.pop("seeds", None)
        merged[key] = value

    values = {}
    for key, value in merged.items():
        if key not in _KNOWN_KEYS:
            raise ConfigError("unknown configuration key", key)
        coerced = _coerce(key, value)
        values["seeds" if key == "seed" else key] = coerced

    for key in ("problem", "algorithm"):
        if key not in values:
            raise ConfigError("is required", key)
    if values["problem"] not in PROBLEMS:
        raise ConfigError(f"unknown problem; choose from {sorted(PROBLEMS)}", "problem")
    if values["algorithm"] not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm; choose from {list(ALGORITHMS)}", "algorithm")
    if values.get("fail_after") is not None and values["fail_after"] < 0:
        raise ConfigError("must be non-negative", "fail_after")

    run_cfg = RunConfig(**{k: v for k, v in values.items() if k in _RUN_FIELDS})
    try:
        run_cfg.validate()
    except ValueError as exc:
        key, _, rest = str(exc).partition(" ")
        if key in _RUN_FIELDS:
            raise ConfigError(rest, key) from None
        raise ConfigError(str(exc)) from None

    return ExperimentConfig(
        problem=values["problem"],
        algorithm=values["algorithm"],
        seeds=values.get("seeds", list(DEFAULT_SEEDS)),
        run=run_cfg,
        output_dir=Path(values.get("output_dir", "results")),
        fail_after=values.get("fail_after"),
    )


def _fmt(x: float) -> str:
    return "" if isinstance(x, float) and math.isnan(x) else repr(float(x))


def history_rows(history: RunHistory, dim: int):
    header = (["iteration", "phase", "source_id"] + [f"x_{i + 1}" for i in range(dim)]
              + ["value", "cost", "cumulated_cost", "incumbent_value", "corrected"])
    yield header
    for r in history:
        yield ([str(r.iteration), r.phase, str(r.source_id)]
               + [_fmt(v) for v in r.location]
               + [_fmt(r.value), _fmt(r.cost), _fmt(r.cumulated_cost), _fmt(r.incumbent_value),
                  "true" if r.corrected else "false"])


def write_history_csv(history: RunHistory, dim: int, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerows(history_rows(history, dim))


def result_to_dict(result: RunResult) -> dict:
    return {
        "status": "ok",
        "algorithm": result.algorithm,
        "seed": result.seed,
        "best_location": [float(v) for v in result.best_location],
        "best_value": result.best_value,
        "total_cost": result.total_cost,
        "evaluations_per_source": list(result.evaluations_per_source),
        "n_records": len(result.history),
    }


def _write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def mean_std(values) -> dict:
    """Mean and population standard deviation; nulls when there is nothing to aggregate."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return {"mean": None, "std": None}
    return {"mean": float(values.mean()), "std": float(values.std())}


def run_stem(cfg: ExperimentConfig, seed: int) -> str:
    return f"{cfg.problem}_{cfg.algorithm}_seed{seed}"


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every seed, write per-run history/result files and the summary.

    Failed runs keep their partial history and are listed in the summary
    with ``status: "failed"``; aggregates cover successful runs only.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    for seed in cfg.seeds:
        problem = get_problem(cfg.problem)
        problem.fail_after = cfg.fail_after
        stem = run_stem(cfg, seed)
        log.info("running %s", stem)
        try:
            result = run(problem, cfg.run_config(seed))
        except RunAborted as exc:
            write_history_csv(exc.history, problem.dim, out / f"{stem}_history.csv")
            entry = {"status": "failed", "algorithm": cfg.algorithm, "seed": seed,
                     "error": str(exc), "n_records": len(exc.history)}
            _write_json(entry, out / f"{stem}_result.json")
            runs.append(entry)
            continue
        write_history_csv(result.history, problem.dim, out / f"{stem}_history.csv")
        entry = result_to_dict(result)
        _write_json(entry, out / f"{stem}_result.json")
        runs.append(entry)

    ok = [r for r in runs if r["status"] == "ok"]
    summary = {
        "problem": cfg.problem,
        "algorithm": cfg.algorithm,
        "seeds": list(cfg.seeds),
        "n_runs": len(runs),
        "n_failed": len(runs) - len(ok),
        "best_value": mean_std([r["best_value"] for r in ok]),
        "total_cost": mean_std([r["total_cost"] for r in ok]),
        "runs": runs,
        "config": cfg.to_dict(),
        "metadata": {"timestamp": datetime.now(timezone.utc).isoformat()},
    }
    _write_json(summary, out / f"{cfg.problem}_{cfg.algorithm}_summary.json")
    return summary


def compare_summaries(wild: dict, cooling: dict) -> dict:
    """Pair two summaries by seed: quality gap and percentage of cost.

    ``delta_best`` is ``best_wild - best_cooling`` and ``pct_cost`` is
    ``100 * cost_wild / cost_cooling``, each reported as mean and population
    standard deviation over the seeds both runs completed.
    """
    a = {r["seed"]: r for r in wild["runs"] if r["status"] == "ok"}
    b = {r["seed"]: r for r in cooling["runs"] if r["status"] == "ok"}
    seeds = sorted(a.keys() & b.keys())
    per_seed = [
        {
            "seed": s,
            "delta_best": a[s]["best_value"] - b[s]["best_value"],
            "pct_cost": 100.0 * a[s]["total_cost"] / b[s]["total_cost"],
        }
        for s in seeds
    ]
    return {
        "problem": wild.get("problem"),
        "algorithms": [wild.get("algorithm"), cooling.get("algorithm")],
        "seeds": seeds,
        "delta_best": mean_std([p["delta_best"] for p in per_seed]),
        "pct_cost": mean_std([p["pct_cost"] for p in per_seed]),
        "per_seed": per_seed,
    }
