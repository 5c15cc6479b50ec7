"""`lab` command line: seeded batch experiments with JSON configs.

Exit codes: 0 success, 1 an inequality check failed, 2 invalid config,
3 missing fixture (message names the refresh command), 4 unwritable output
directory, 5 fixture hash mismatch without --force.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .experiments import (
    EXPERIMENTS,
    RUNNERS,
    ResultRecord,
    RunConfig,
    compute_oracle,
    oracle_specs,
)
from .fixtures import (
    FixtureHashError,
    MissingFixtureError,
    content_hash,
    fixture_dir,
    load_fixture,
    save_fixture,
)
from .plotting import plot_loglog

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_BAD_CONFIG = 2
EXIT_MISSING_FIXTURE = 3
EXIT_UNWRITABLE = 4
EXIT_HASH_MISMATCH = 5

REFRESH_BUDGET_FLOOR = 10 ** 6


class ConfigError(ValueError):
    pass


def _key_line(text: str, key: str) -> int:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return lineno
    return 0


def load_config(path: Path) -> RunConfig:
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"{path}: cannot read config: {err}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}: invalid JSON: {err.msg}")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}:1: config must be a JSON object")
    for key in raw:
        if key not in RunConfig.KNOWN_KEYS:
            raise ConfigError(
                f"{path}:{_key_line(text, key)}: unknown config key {key!r}")
    if "experiment" not in raw:
        raise ConfigError(f"{path}:1: missing required key 'experiment'")
    for seq_key in ("epsilons", "alphas", "points"):
        if seq_key in raw and raw[seq_key] is not None:
            raw[seq_key] = tuple(raw[seq_key])
    try:
        return RunConfig(**raw)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{path}:1: {err}")


def _prepare_output(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as err:
        raise PermissionError(f"output directory {path} is not writable: {err}")


def write_outputs(rec: ResultRecord, out_dir: Path, wall_time: float,
                  config_echo: dict) -> None:
    payload = {
        "experiment": rec.experiment,
        "config": config_echo,
        "config_hash": rec.config_hash,
        "metrics": rec.metrics,
        "violations": rec.violations,
        "warnings": rec.warnings,
        "wall_time_s": wall_time,
    }
    (out_dir / "results.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n")
    with (out_dir / "results.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(rec.row_columns)
        writer.writerows(rec.rows)
    series = rec.series or []
    plot = plot_loglog(series, title=rec.series_labels[2],
                       x_label=rec.series_labels[0], y_label=rec.series_labels[1])
    (out_dir / "plot.svg").write_text(plot.svg + "\n")
    if plot.dropped:
        rec.warnings.append(f"plot dropped {plot.dropped} nonpositive points")


def run_refresh(cfg: RunConfig, force: bool) -> int:
    if cfg.budget < REFRESH_BUDGET_FLOOR:
        print(f"refusing oracle refresh below the budget floor "
              f"{REFRESH_BUDGET_FLOOR} (got {cfg.budget})", file=sys.stderr)
        return EXIT_BAD_CONFIG
    store = fixture_dir()
    for spec in oracle_specs():
        fresh = compute_oracle(spec, workers=cfg.workers)
        payload = fresh.payload()
        existing_path = store / f"{spec['name']}.json"
        if existing_path.exists():
            try:
                old = load_fixture(spec["name"])
            except FixtureHashError as err:
                print(f"fixture store integrity failure: {err}", file=sys.stderr)
                return EXIT_HASH_MISMATCH
            if old["hash"] != payload["hash"] and not force:
                print(f"fixture {spec['name']} changed "
                      f"({old['hash'][:12]} -> {payload['hash'][:12]}); "
                      f"rerun with --force to overwrite", file=sys.stderr)
                return EXIT_HASH_MISMATCH
        save_fixture(fresh)
        print(f"wrote {spec['name']}: value={fresh.value:.10g} "
              f"stderr={fresh.stderr:.3g} hash={payload['hash'][:12]}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lab", description="run a laboratory experiment from a JSON config")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute one experiment config")
    run_p.add_argument("config", type=Path)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--budget", type=int, default=None)
    run_p.add_argument("--out", type=Path, default=None)
    run_p.add_argument("--workers", type=int, default=None)
    run_p.add_argument("--force", action="store_true",
                       help="allow oracle refresh to overwrite changed fixtures")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as err:
        print(str(err), file=sys.stderr)
        return EXIT_BAD_CONFIG
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.budget is not None:
        overrides["budget"] = args.budget
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        try:
            cfg = RunConfig(**{**asdict(cfg), **overrides})
        except ValueError as err:
            print(str(err), file=sys.stderr)
            return EXIT_BAD_CONFIG

    if cfg.experiment == "oracle-refresh":
        return run_refresh(cfg, args.force)

    out_dir = Path(cfg.output_dir)
    try:
        _prepare_output(out_dir)
    except PermissionError as err:
        print(str(err), file=sys.stderr)
        return EXIT_UNWRITABLE

    start = time.perf_counter()
    try:
        rec = RUNNERS[cfg.experiment](cfg)
    except MissingFixtureError as err:
        print(str(err), file=sys.stderr)
        return EXIT_MISSING_FIXTURE
    except FixtureHashError as err:
        print(f"fixture store integrity failure: {err}", file=sys.stderr)
        return EXIT_HASH_MISMATCH
    wall = time.perf_counter() - start

    config_echo = asdict(cfg)
    write_outputs(rec, out_dir, wall, config_echo)
    n_metrics = len(rec.metrics)
    print(f"{cfg.experiment}: {n_metrics} metrics, "
          f"{rec.violations} violations, {wall:.2f}s -> {out_dir}")
    return EXIT_VIOLATION if rec.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
