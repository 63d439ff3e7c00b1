"""Waterfilling over a handful of eigenmodes, and what it buys over equal power."""

import numpy as np

from trihybrid.precoding import water_level, waterfill

gains = np.array([8.0, 3.0, 1.0, 0.2])
for total in (0.5, 2.0, 10.0):
    p = waterfill(gains, total)
    rate = np.sum(np.log2(1 + gains * p))
    flat = np.sum(np.log2(1 + gains * total / gains.size))
    print(f"P = {total:5.1f}  mu = {water_level(gains, total):6.3f}  p = {np.round(p, 3)}"
          f"  rate {rate:.3f} vs equal {flat:.3f}")
