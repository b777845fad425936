"""Experiment configuration, problem registry and trace/summary output.

A config file is flat ``key=value`` text, one entry per line, with dotted
keys and JSON values (bare words are read as strings)::

    # Gaussian constraint on a half-line
    problem.id = "half_line"
    problem.sigma = 1.4142135623730951
    controller.epsilon = 0.1
    controller.beta = 0.9
    run.T = 1000
    run.seed = 0
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .controller import ControllerConfig, TraceRecord, empirical_frequency, run
from .problems import (
    AtomMixture,
    GaussianLpProblem,
    HalfLineProblem,
    MaxCoordinateProblem,
    PathConfig,
    PathPlanningProblem,
    SyntheticBetaProblem,
    UniformDistribution,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PROBLEM_IDS",
    "parse_config_text",
    "load_config",
    "build_problem",
    "run_replication",
    "trace_csv",
    "summary_rows",
    "summary_csv",
]

TRACE_COLUMNS = ("t", "N", "theta", "risk", "violation", "solver_status", "elapsed_ms")
SUMMARY_COLUMNS = (
    "replication",
    "seed",
    "T",
    "freq",
    "final_theta",
    "final_N",
    "risk_q05",
    "risk_q50",
    "risk_q95",
    "N_q05",
    "N_q50",
    "N_q95",
)
QUANTILES = (0.05, 0.5, 0.95)
SEED_LIMIT = 2**64

_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")
_BARE = re.compile(r"^[A-Za-z_./~][A-Za-z0-9_\-./~]*$")


class ConfigError(ValueError):
    """Bad configuration; the CLI maps it to exit code 2."""


def _parse_value(raw: str, where: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        if _BARE.match(raw):
            return raw
        raise ConfigError(f"{where}: cannot parse value {raw!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key=value`` lines into a flat dict keyed by dotted names."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"{where}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        out[key] = _parse_value(raw, where)
    return out


def parse_override(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise ConfigError(f"override {item!r}: expected key=value")
    key, raw = (s.strip() for s in item.split("=", 1))
    if not _KEY.match(key):
        raise ConfigError(f"override: bad key {key!r}")
    return key, _parse_value(raw, f"override {key}")


# -- problems -------------------------------------------------------------------


def _build_synthetic(p):
    return SyntheticBetaProblem(_int(p.pop("d", 1), "problem.d"))


def _build_half_line(p):
    mu = _num(p.pop("mu", 1.0), "problem.mu")
    if "variance" in p and "sigma" in p:
        raise ConfigError("give problem.sigma or problem.variance, not both")
    if "variance" in p:
        sigma = math.sqrt(_num(p.pop("variance"), "problem.variance"))
    else:
        sigma = _num(p.pop("sigma", math.sqrt(2.0)), "problem.sigma")
    return HalfLineProblem(mu, sigma)


def _build_gaussian_lp(p):
    return GaussianLpProblem(_int(p.pop("dim", 20), "problem.dim"))


def _build_max_coordinate(p):
    dim = _int(p.pop("dim", 400), "problem.dim")
    kind = p.pop("dist", "uniform")
    if kind == "uniform":
        dist = UniformDistribution()
    elif kind == "atom":
        defaults = AtomMixture()
        dist = AtomMixture(
            atom=_num(p.pop("atom", defaults.atom), "problem.atom"),
            mass=_num(p.pop("mass", defaults.mass), "problem.mass"),
        )
        if not (0.0 <= dist.mass <= 1.0):
            raise ConfigError("problem.mass must lie in [0, 1]")
    else:
        raise ConfigError(f"problem.dist must be 'uniform' or 'atom', got {kind!r}")
    return MaxCoordinateProblem(dim, dist)


def _build_path_planning(p):
    variant = p.pop("variant", "steady")
    known = {f.name for f in fields(PathConfig)}
    kw = {}
    for k in list(p):
        if k in known:
            v = p.pop(k)
            kw[k] = tuple(v) if isinstance(v, list) else v
    if variant == "steady":
        cfg = PathConfig.steady(**kw)
    elif variant == "time_varying":
        cfg = PathConfig.time_varying(**kw)
    else:
        raise ConfigError(f"problem.variant must be 'steady' or 'time_varying', got {variant!r}")
    return PathPlanningProblem(cfg)


_BUILDERS = {
    "synthetic_beta": _build_synthetic,
    "half_line": _build_half_line,
    "gaussian_lp": _build_gaussian_lp,
    "max_coordinate": _build_max_coordinate,
    "path_planning": _build_path_planning,
}
PROBLEM_IDS = tuple(_BUILDERS)


def _num(v, key) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    return float(v)


def _int(v, key) -> int:
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer, got {v!r}")
    return v


def build_problem(problem_id: str, params: dict):
    if problem_id not in _BUILDERS:
        raise ConfigError(f"unknown problem id {problem_id!r}; known: {', '.join(PROBLEM_IDS)}")
    p = dict(params)
    try:
        problem = _BUILDERS[problem_id](p)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"problem {problem_id}: {exc}") from exc
    if p:
        raise ConfigError(f"unknown problem keys: {', '.join('problem.' + k for k in sorted(p))}")
    return problem


# -- experiment config -------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    problem_id: str
    problem_params: dict = field(default_factory=dict)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    T: int = 1000
    reps: int = 1
    seed: int = 0
    out: str = "out"

    @classmethod
    def from_flat(cls, flat: dict) -> "ExperimentConfig":
        problem, ctrl, run_kw = {}, {}, {}
        for key, value in flat.items():
            head, _, tail = key.partition(".")
            if not tail or "." in tail:
                raise ConfigError(f"unknown key {key!r}")
            if head == "problem":
                problem[tail] = value
            elif head == "controller":
                ctrl[tail] = value
            elif head == "run":
                run_kw[tail] = value
            else:
                raise ConfigError(f"unknown section in key {key!r}")
        if "id" not in problem:
            raise ConfigError("missing problem.id")
        problem_id = problem.pop("id")
        if not isinstance(problem_id, str):
            raise ConfigError("problem.id must be a string")

        known = {f.name for f in fields(ControllerConfig)}
        bad = set(ctrl) - known
        if bad:
            raise ConfigError(f"unknown controller keys: {', '.join(sorted(bad))}")
        for k in ("n_initial", "n_max", "bernoulli_samples"):
            if k in ctrl:
                ctrl[k] = _int(ctrl[k], f"controller.{k}")
        for k in ("epsilon", "beta"):
            if k in ctrl:
                ctrl[k] = _num(ctrl[k], f"controller.{k}")
        try:
            controller = ControllerConfig(**ctrl)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"controller: {exc}") from exc

        bad = set(run_kw) - {"T", "reps", "seed", "out"}
        if bad:
            raise ConfigError(f"unknown run keys: {', '.join(sorted(bad))}")
        cfg = cls(
            problem_id=problem_id,
            problem_params=problem,
            controller=controller,
            T=_int(run_kw.get("T", 1000), "run.T"),
            reps=_int(run_kw.get("reps", 1), "run.reps"),
            seed=_int(run_kw.get("seed", 0), "run.seed"),
            out=str(run_kw.get("out", "out")),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.T < 1:
            raise ConfigError("run.T must be positive")
        if self.reps < 1:
            raise ConfigError("run.reps must be positive")
        if not (0 <= self.seed and self.seed + self.reps <= SEED_LIMIT):
            raise ConfigError("run.seed must be an unsigned 64-bit integer")
        build_problem(self.problem_id, self.problem_params)

    def replication_seed(self, i: int) -> int:
        return self.seed + i


def load_config(path, overrides=()) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    flat = parse_config_text(text, str(path))
    for key, value in overrides:
        flat[key] = value
    return ExperimentConfig.from_flat(flat)


def run_replication(cfg: ExperimentConfig, i: int) -> list[TraceRecord]:
    problem = build_problem(cfg.problem_id, cfg.problem_params)
    return run(problem, cfg.controller, cfg.T, cfg.replication_seed(i))


# -- output ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def trace_csv(trace, epsilon: float, timings: bool = False) -> str:
    """Trace as CSV text.

    ``elapsed_ms`` is left empty unless ``timings`` is set, so that reruns with
    the same seed are byte-identical.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in trace:
        w.writerow(
            [
                r.t,
                r.N,
                "flat" if r.theta is None else _fmt(r.theta),
                _fmt(r.risk),
                int(r.risk > epsilon),
                r.solver_status,
                f"{1000.0 * r.elapsed:.3f}" if timings else "",
            ]
        )
    return buf.getvalue()


def summary_rows(cfg: ExperimentConfig, traces) -> list[list]:
    eps = cfg.controller.epsilon
    rows = []
    for i, trace in enumerate(traces):
        risks = np.array([r.risk for r in trace])
        Ns = np.array([r.N for r in trace], dtype=float)
        theta = trace[-1].theta
        rows.append(
            [
                i,
                cfg.replication_seed(i),
                len(trace),
                _fmt(empirical_frequency(trace, eps)),
                "flat" if theta is None else _fmt(theta),
                trace[-1].N,
                *(_fmt(q) for q in np.quantile(risks, QUANTILES)),
                *(_fmt(q) for q in np.quantile(Ns, QUANTILES)),
            ]
        )
    return rows


def summary_csv(cfg: ExperimentConfig, traces) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    w.writerows(summary_rows(cfg, traces))
    return buf.getvalue()


def trace_filename(cfg: ExperimentConfig, i: int, ext: str = "csv") -> str:
    return f"trace.{ext}" if cfg.reps == 1 else f"trace_{i:03d}.{ext}"
