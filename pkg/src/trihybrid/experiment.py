"""Seeded Monte Carlo sweeps of input power across architectures."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelRealization, expected_pulse_power, random_channel
from .config import ExperimentConfig
from .metrics import spectral_efficiency
from .power import power_consumption, component_loss, transmit_power_from_input
from .precoding import design_precoders

CSV_FIELDS = ("arch", "p_in_w", "se_bps_hz", "se_per_subcarrier", "ee_bps_hz_per_w",
              "p_cons_w", "loss_db", "n_trials", "seed")
STDERR_FIELDS = ("se_stderr", "ee_stderr")


@dataclass(frozen=True)
class SweepRow:
    arch: str
    p_in_w: float
    se_bps_hz: float
    se_per_subcarrier: float
    ee_bps_hz_per_w: float
    p_cons_w: float
    loss_db: float
    n_trials: int
    seed: int
    se_stderr: float = 0.0
    ee_stderr: float = 0.0
    n_degenerate: int = 0


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    # raw per-trial spectral efficiencies, keyed by architecture: (grid, trial)
    samples: dict | None = None

    def row(self, arch: str, p_in_w: float) -> SweepRow:
        for r in self.rows:
            if r.arch == arch and r.p_in_w == p_in_w:
                return r
        raise KeyError((arch, p_in_w))

    def by_arch(self, arch: str) -> list[SweepRow]:
        return [r for r in self.rows if r.arch == arch]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial; depends on the master seed and trial index only."""
    return np.random.default_rng([seed, trial])


def trial_channel(config: ExperimentConfig, trial: int,
                  power_profile: np.ndarray | None = None) -> ChannelRealization:
    shape = config.pulse_shape()
    if power_profile is None and config.channel_normalization == "expected":
        power_profile = expected_pulse_power(shape)
    return random_channel(trial_rng(config.seed, trial), config.n_paths, config.geometry(),
                          shape, config.channel_normalization, power_profile)


def _run_trial(config: ExperimentConfig, trial: int, power_profile) -> tuple[np.ndarray, np.ndarray]:
    channel = trial_channel(config, trial, power_profile)
    noise_var = config.resolved_noise_var()
    catalog = config.component_catalog()
    n_arch, n_grid = len(config.architectures), len(config.input_power_w)
    se = np.zeros((n_arch, n_grid))
    degenerate = np.zeros((n_arch, n_grid), dtype=bool)
    for a, arch in enumerate(config.architectures):
        spec = config.architecture_spec(arch)
        dma = config.dma_model(spec)
        loss = component_loss(spec, catalog)
        for g, p_in in enumerate(config.input_power_w):
            p_tx = transmit_power_from_input(p_in, loss)
            pre = design_precoders(channel, spec, dma, p_tx, noise_var, config.power_mode)
            degenerate[a, g] = pre.degenerate
            se[a, g] = 0.0 if pre.degenerate else spectral_efficiency(channel, pre.effective, noise_var)
    return se, degenerate


def run_sweep(config: ExperimentConfig, n_jobs: int = 1) -> SweepResult:
    """Average spectral and energy efficiency over ``config.n_trials`` channels.

    Every architecture sees the same channel in a given trial. Trials are
    independent and can be spread over ``n_jobs`` processes without changing
    the result.
    """
    shape = config.pulse_shape()
    profile = expected_pulse_power(shape) if config.channel_normalization == "expected" else None
    trials = range(config.n_trials)
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            outputs = list(pool.map(_run_trial, [config] * len(trials), trials,
                                    [profile] * len(trials)))
    else:
        outputs = [_run_trial(config, t, profile) for t in trials]
    se = np.stack([o[0] for o in outputs], axis=-1)  # (arch, grid, trial)
    degenerate = np.stack([o[1] for o in outputs], axis=-1)

    catalog = config.component_catalog()
    n = config.n_trials
    k = config.n_subcarriers
    rows = []
    samples = {}
    for a, arch in enumerate(config.architectures):
        spec = config.architecture_spec(arch)
        loss = component_loss(spec, catalog)
        samples[arch] = se[a]
        for g, p_in in enumerate(config.input_power_w):
            p_tx = transmit_power_from_input(p_in, loss)
            p_cons = power_consumption(spec, catalog, p_tx).total
            values = se[a, g]
            mean = math.fsum(values) / n
            stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
            rows.append(SweepRow(
                arch=arch, p_in_w=float(p_in), se_bps_hz=mean, se_per_subcarrier=mean / k,
                ee_bps_hz_per_w=mean / p_cons, p_cons_w=p_cons, loss_db=loss,
                n_trials=n, seed=config.seed, se_stderr=stderr, ee_stderr=stderr / p_cons,
                n_degenerate=int(degenerate[a, g].sum()),
            ))
    rows.sort(key=lambda r: (r.arch, r.p_in_w))
    return SweepResult(tuple(rows), samples)


def _row_values(row: SweepRow, columns) -> dict:
    d = asdict(row)
    return {c: d[c] for c in columns}


def emit_results(result: SweepResult, path: str | Path, format: str = "csv",
                 include_stderr: bool = False) -> Path:
    """Write rows sorted by ``(arch, p_in_w)`` as CSV or JSON lines.

    Floats are written with ``repr`` so that parsing them back is exact.
    """
    if not result.rows:
        raise ValueError("nothing to write: result has no rows")
    columns = CSV_FIELDS + (STDERR_FIELDS if include_stderr else ())
    rows = sorted(result.rows, key=lambda r: (r.arch, r.p_in_w))
    path = Path(path)
    if format == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for r in rows:
                vals = _row_values(r, columns)
                writer.writerow([repr(v) if isinstance(v, float) else v for v in vals.values()])
    elif format == "json-lines":
        with path.open("w") as fh:
            for r in rows:
                fh.write(json.dumps(_row_values(r, columns)) + "\n")
    else:
        raise ValueError(f"unknown format {format!r}; use 'csv' or 'json-lines'")
    return path


_INT_FIELDS = {"n_trials", "seed"}


def read_results(path: str | Path, format: str = "csv") -> list[dict]:
    """Parse a file written by :func:`emit_results` back into dicts."""
    path = Path(path)
    if format == "json-lines":
        return [json.loads(line) for line in path.read_text().splitlines() if line]
    with path.open(newline="") as fh:
        out = []
        for rec in csv.DictReader(fh):
            out.append({k: (v if k == "arch" else int(v) if k in _INT_FIELDS else float(v))
                        for k, v in rec.items()})
        return out
