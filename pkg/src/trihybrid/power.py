"""Component loss and power consumption of each transmitter architecture."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Mapping

from .architecture import Architecture, ArchitectureSpec


@dataclass(frozen=True)
class ComponentCatalog:
    """Per-component power draw (W) and insertion loss (dB).

    ``dac_power`` stands for the DAC draw at a fixed resolution and sampling
    rate; ``dac_bits`` and ``sample_rate_hz`` are carried for reference only
    and do not enter any formula.

    ``hf_full_shifter_count`` selects ``n_t * n_rf`` phase shifters for the
    fully-connected hybrid (one per RF-chain/antenna pair). Set it to False
    to count only ``n_t`` shifters.
    """

    pa_efficiency: float = 0.27
    ps_power_active: float = 21.6e-3
    ps_power_passive: float = 0.0
    dac_power: float = 75.8e-3
    lo_power: float = 22.5e-3
    rf_chain_power: float = 31.6e-3
    varactor_power: float = 0.0
    ps_loss_active: float = -2.3
    ps_loss_passive: float = 8.8
    two_way_divider_loss: float = 0.6
    phase_shifter_kind: str = "active"
    hf_full_shifter_count: bool = True
    dac_bits: int | None = None
    sample_rate_hz: float | None = None

    def __post_init__(self):
        if not 0.0 < self.pa_efficiency <= 1.0:
            raise ValueError("pa_efficiency must lie in (0, 1]")
        for name in ("ps_power_active", "ps_power_passive", "dac_power", "lo_power",
                     "rf_chain_power", "varactor_power"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.phase_shifter_kind not in ("active", "passive"):
            raise ValueError("phase_shifter_kind must be 'active' or 'passive'")

    @property
    def ps_power(self) -> float:
        return self.ps_power_active if self.phase_shifter_kind == "active" else self.ps_power_passive

    @property
    def ps_loss(self) -> float:
        return self.ps_loss_active if self.phase_shifter_kind == "active" else self.ps_loss_passive

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ComponentCatalog":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown catalog field(s): {sorted(unknown)}")
        return replace(self, **dict(overrides))


@dataclass(frozen=True)
class PowerBreakdown:
    total: float
    per_component: dict[str, float] = field(default_factory=dict)
    loss_db: float = 0.0

    @property
    def loss_linear(self) -> float:
        return 10.0 ** (self.loss_db / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def divider_loss(n_ways: int, catalog: ComponentCatalog) -> float:
    """Loss (dB) of an ``n_ways`` divider built from cascaded two-way stages."""
    if n_ways < 1:
        raise ValueError("n_ways must be >= 1")
    return catalog.two_way_divider_loss * math.ceil(math.log2(n_ways))


def combiner_loss(n_ways: int, catalog: ComponentCatalog) -> float:
    # same cascade as the divider, traversed in reverse
    return divider_loss(n_ways, catalog)


def component_loss(spec: ArchitectureSpec, catalog: ComponentCatalog) -> float:
    """Signal-path loss in dB between DAC output and antenna input."""
    k = spec.kind
    if k in (Architecture.FD, Architecture.DO):
        return 0.0
    if k is Architecture.DH:
        return divider_loss(spec.n_rf, catalog)
    if k in (Architecture.TH, Architecture.A):
        return divider_loss(spec.n_rf, catalog) + catalog.ps_loss
    if k is Architecture.HP:
        return divider_loss(spec.n_sub, catalog) + catalog.ps_loss
    if k is Architecture.HF:
        return divider_loss(spec.n_t, catalog) + catalog.ps_loss + combiner_loss(spec.n_rf, catalog)
    raise ValueError(f"unknown architecture {k!r}")


def phase_shifter_count(spec: ArchitectureSpec, catalog: ComponentCatalog | None = None) -> int:
    k = spec.kind
    if k in (Architecture.TH, Architecture.A, Architecture.HP):
        return spec.n_t
    if k is Architecture.HF:
        full = True if catalog is None else catalog.hf_full_shifter_count
        return spec.n_t * spec.n_rf if full else spec.n_t
    return 0


def power_consumption(spec: ArchitectureSpec, catalog: ComponentCatalog,
                      transmit_power: float) -> PowerBreakdown:
    """Total transmitter draw for a given radiated (PA output) power."""
    if transmit_power < 0:
        raise ValueError("transmit_power must be non-negative")
    n_ps = phase_shifter_count(spec, catalog)
    n_var = spec.n_t * spec.feed_length if spec.uses_dma else 0
    parts = {
        "LO": catalog.lo_power,
        "PA": transmit_power / catalog.pa_efficiency,
        "DAC": spec.n_rf * 2.0 * catalog.dac_power,
        "RF": spec.n_rf * catalog.rf_chain_power,
        "PS": n_ps * catalog.ps_power,
        "VAR": n_var * catalog.varactor_power,
    }
    return PowerBreakdown(total=math.fsum(parts.values()), per_component=parts,
                          loss_db=component_loss(spec, catalog))


def transmit_power_from_input(input_power: float, loss_db: float) -> float:
    """Power left for transmission after the architecture's component loss."""
    if input_power < 0:
        raise ValueError("input_power must be non-negative")
    return input_power / db_to_linear(loss_db)
