"""Steer a dynamic metasurface antenna toward a single far-field direction.

Each slot can only realize weights on the Lorentzian circle, a radius-1/2
circle centered at -j/2. The mapping keeps the phase of the wanted weight
and lets the amplitude follow. We compare the array gain of the resulting
DMA beam with an unconstrained phase-only beam.
"""

import numpy as np

from trihybrid.channel import ArrayGeometry, tx_upa_steering_vector
from trihybrid.precoding import DmaModel, lorentzian_map, lorentzian_weight, waveguide_coefficients

phi = np.linspace(0, 2 * np.pi, 9)
w = lorentzian_weight(phi)
print("distance of weights from -j/2:", np.round(np.abs(w + 0.5j), 12))

g = ArrayGeometry.from_carrier(15e9, 1, 32, 1)
a = tx_upa_steering_vector(0.5, 0.0, g)  # one DMA row, 32 slots

for atten in (0.0, 0.02, 0.1):
    eta = waveguide_coefficients(DmaModel(32, 1, atten))
    f = lorentzian_map(a, eta)
    gain = abs(np.vdot(a, f)) ** 2 / np.linalg.norm(f) ** 2
    print(f"attenuation {atten:4.2f}: normalized array gain {gain:5.2f} "
          f"(phase-only ideal {1.0:.2f}), last slot |eta| = {abs(eta[-1]):.3f}")
