"""A small input-power sweep, printed as a table.

This is the same pipeline the ``simulate`` command runs, at a size that
finishes in a few seconds. Increase ``n_trials`` for smoother curves.
"""

import math

from trihybrid import ExperimentConfig
from trihybrid.experiment import run_sweep

cfg = ExperimentConfig(n_rx=16, n_subcarriers=32, n_trials=10)
result = run_sweep(cfg)

print(f"{'arch':>4}" + "".join(f"{10 * math.log10(p * 1e3):>13.1f} dBm"
                                 for p in cfg.input_power_w))
for arch in cfg.architectures:
    rows = result.by_arch(arch)
    cells = "".join(f"{r.se_bps_hz:>9.1f} /{r.ee_bps_hz_per_w:>7.1f}" for r in rows)
    print(f"{arch:>4}{cells}")
print("\ncells are SE (bit/s/Hz summed over subcarriers) / EE (bit/s/Hz/W)")
