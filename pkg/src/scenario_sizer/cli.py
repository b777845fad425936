"""Command line: ``run`` experiments, ``fit`` theta offline, ``size`` a query.

Exit codes: 0 success, 2 usage or configuration error, 3 runtime failure.
Log verbosity comes from ``SCENARIO_SIZER_LOG`` (error, info or debug).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

from .experiment import (
    SEED_LIMIT,
    ConfigError,
    load_config,
    parse_override,
    run_replication,
    summary_csv,
    trace_csv,
    trace_filename,
)
from .mle import DataPoint, Dataset, fit
from .sizer import DEFAULT_N_MAX, SizerQuery, optimal_sample_size
from .specfun import DomainError
from .svg import fit_figure, trace_figure

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3
LOG_ENV = "SCENARIO_SIZER_LOG"
_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("scenario_sizer")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < SEED_LIMIT:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _count(text: str) -> int:
    """Integer that may be written in float notation, e.g. ``1e6``."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scenario-sizer", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run (replicated) closed-loop experiments")
    r.add_argument("--config", required=True, metavar="PATH")
    r.add_argument("--seed", type=_u64, help="base seed; replication i uses seed + i")
    r.add_argument("--reps", type=_positive_int)
    r.add_argument("--jobs", type=_positive_int, default=1)
    r.add_argument("--out", metavar="DIR")
    r.add_argument("--plot", action="store_true", help="also write an SVG per replication")
    r.add_argument(
        "--timings",
        action="store_true",
        help="fill the elapsed_ms column (makes traces non-reproducible byte for byte)",
    )
    r.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config entry, e.g. --set controller.epsilon=0.05",
    )

    f = sub.add_parser("fit", help="fit theta on a CSV with columns v,N[,w]")
    f.add_argument("csv", metavar="CSV")
    f.add_argument("--plot", metavar="SVG", help="write a histogram with the fitted pdf")
    f.add_argument("--plot-n", type=_positive_int, metavar="N",
                   help="sample size to plot (default: the most frequent one)")

    s = sub.add_parser("size", help="optimal sample size for a given theta")
    s.add_argument("theta", type=float)
    s.add_argument("epsilon", type=float)
    s.add_argument("beta", type=float)
    s.add_argument("n_max", type=_count, nargs="?", default=DEFAULT_N_MAX)
    return p


def _setup_logging() -> None:
    level = os.environ.get(LOG_ENV, "error").strip().lower() or "error"
    if level not in _LEVELS:
        raise ConfigError(f"{LOG_ENV} must be one of {', '.join(_LEVELS)}, got {level!r}")
    logging.basicConfig(level=_LEVELS[level], format="%(levelname)s %(name)s: %(message)s")


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- run ------------------------------------------------------------------------------------


def _replicate(args):
    cfg, i = args
    start = time.perf_counter()
    trace = run_replication(cfg, i)
    return trace, time.perf_counter() - start


def cmd_run(args) -> int:
    overrides = [parse_override(o) for o in args.overrides]
    cfg = load_config(args.config, overrides)
    changes = {k: v for k, v in (("seed", args.seed), ("reps", args.reps), ("out", args.out)) if v is not None}
    cfg = replace(cfg, **changes)
    cfg.validate()

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = min(args.jobs, cfg.reps)
    log.info("running %s: T=%d reps=%d jobs=%d", cfg.problem_id, cfg.T, cfg.reps, jobs)

    lines = [f"start {_now()}", "config " + json.dumps(_config_dict(cfg), sort_keys=True)]
    work = [(cfg, i) for i in range(cfg.reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_replicate, work))
    else:
        results = [_replicate(w) for w in work]

    traces = []
    eps, beta = cfg.controller.epsilon, cfg.controller.beta
    for i, (trace, wall) in enumerate(results):
        traces.append(trace)
        _write(out / trace_filename(cfg, i), trace_csv(trace, eps, timings=args.timings))
        if args.plot:
            _write(out / trace_filename(cfg, i, "svg"), trace_figure(trace, eps, beta))
        steps_ms = [1000.0 * r.elapsed for r in trace]
        lines.append(
            f"replication {i} seed {cfg.replication_seed(i)} wall_s {wall:.3f} "
            f"step_ms_mean {sum(steps_ms) / len(steps_ms):.3f} step_ms_max {max(steps_ms):.3f}"
        )
    _write(out / "summary.csv", summary_csv(cfg, traces))
    lines.append(f"end {_now()}")
    _write(out / "run.log", "\n".join(lines) + "\n")
    print(summary_csv(cfg, traces), end="")
    return EXIT_OK


def _config_dict(cfg) -> dict:
    d = asdict(cfg)
    d["controller"] = asdict(cfg.controller)
    return d


# -- fit ------------------------------------------------------------------------------------


def _read_points(path: str) -> list[DataPoint]:
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        cols = [c.strip() for c in (reader.fieldnames or [])]
        if not cols:
            raise ConfigError(f"{path}: empty file")
        if "v" not in cols or "N" not in cols:
            raise ConfigError(f"{path}: need columns v,N[,w], got {','.join(cols)}")
        reader.fieldnames = cols
        points = []
        for lineno, row in enumerate(reader, 2):
            try:
                v = float(row["v"])
                n = float(row["N"])
                w = float(row["w"]) if row.get("w") not in (None, "") else 1.0
                if not n.is_integer():
                    raise ValueError(f"N must be an integer, got {row['N']!r}")
                points.append(DataPoint(v, int(n), w))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    if not points:
        raise ConfigError(f"{path}: no data rows")
    return points


def cmd_fit(args) -> int:
    points = _read_points(args.csv)
    data = Dataset(points)
    res = fit(data)
    if res.is_flat:
        print("theta=flat (every observation has v=0 or N=0; the likelihood is constant)")
        print(f"loglik={res.loglik!r}")
        return EXIT_OK
    print(f"theta={res.theta!r}")
    print(f"loglik={res.loglik!r}")
    print(f"points={len(data)} fallbacks={res.fallbacks} max_iter_hits={res.max_iter_hits}")
    if args.plot:
        if args.plot_n is not None:
            n = args.plot_n
        else:
            counts = {}
            for p in points:
                counts[p.N] = counts.get(p.N, 0) + 1
            n = max(sorted(counts), key=counts.get)
        _write(Path(args.plot), fit_figure([p.v for p in points if p.N == n], n, res.theta))
    return EXIT_OK


# -- size -----------------------------------------------------------------------------------


def cmd_size(args) -> int:
    try:
        q = SizerQuery(args.theta, args.epsilon, args.beta, args.n_max)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    print(optimal_sample_size(q))
    return EXIT_OK


_COMMANDS = {"run": cmd_run, "fit": cmd_fit, "size": cmd_size}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _setup_logging()
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # anything else is a runtime failure
        log.debug("runtime failure", exc_info=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
