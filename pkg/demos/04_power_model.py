"""Where the transmitter power goes, architecture by architecture.

At a fixed 0.1 W input the static blocks (DACs, RF chains, phase shifters)
dominate for the digital and hybrid designs. The tri-hybrid uses two RF
chains for the whole 64-element aperture, which is the source of its
energy-efficiency advantage. Past about 1 W the PA term takes over and
the gap closes.
"""

from trihybrid import ALL_ARCHITECTURES, ComponentCatalog, equal_aperture_spec
from trihybrid.power import power_consumption, transmit_power_from_input

cat = ComponentCatalog()
print(f"{'arch':>4} {'loss dB':>8} {'P_T W':>7} {'P_cons W':>9}  breakdown")
for arch in ALL_ARCHITECTURES:
    spec = equal_aperture_spec(arch, 64)
    br = power_consumption(spec, cat, 0.0)
    p_t = transmit_power_from_input(0.1, br.loss_db)
    br = power_consumption(spec, cat, p_t)
    parts = ", ".join(f"{k} {v:.3f}" for k, v in br.per_component.items() if v)
    print(f"{arch.value:>4} {br.loss_db:8.1f} {p_t:7.3f} {br.total:9.3f}  {parts}")
