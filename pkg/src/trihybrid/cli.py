"""``simulate`` command line entry point.

Environment variables ``TRIHYBRID_SEED`` and ``TRIHYBRID_TRIALS`` override
the config file; ``--seed`` and ``--trials`` override both.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import ConfigError, load_config
from .experiment import emit_results, run_sweep

log = logging.getLogger("trihybrid")

ENV_SEED = "TRIHYBRID_SEED"
ENV_TRIALS = "TRIHYBRID_TRIALS"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Sweep input power across MIMO transmitter architectures and "
                    "report spectral and energy efficiency.",
    )
    p.add_argument("--config", required=True, help="TOML experiment config")
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--format", choices=("csv", "json-lines"), default="csv")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--arch", help="comma-separated subset, e.g. TH,HP,FD")
    p.add_argument("--power-mode", choices=("aip", "aop"), type=str.lower)
    p.add_argument("--stderr", action="store_true", help="add standard-error columns")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _int_env(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(name, f"environment value {raw!r} is not an integer") from None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = load_config(args.config)
        changes = {}
        seed = args.seed if args.seed is not None else _int_env(ENV_SEED)
        trials = args.trials if args.trials is not None else _int_env(ENV_TRIALS)
        if seed is not None:
            changes["seed"] = seed
        if trials is not None:
            changes["n_trials"] = trials
        if args.arch:
            changes["architectures"] = tuple(a.strip() for a in args.arch.split(",") if a.strip())
        if args.power_mode:
            changes["power_mode"] = args.power_mode
        if changes:
            config = config.with_overrides(**changes)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    log.info("running %d trials over %d architectures", config.n_trials, len(config.architectures))
    result = run_sweep(config, n_jobs=args.jobs)
    try:
        emit_results(result, args.out, args.format, include_stderr=args.stderr)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
