"""Experiment configuration and its TOML loader.

Configuration files are TOML with dotted keys; a dotted key maps to the
field of the same name with dots replaced by underscores (``dma.m`` ->
``dma_m``). Keys under ``catalog.`` override :class:`ComponentCatalog`
fields. Example::

    n_subcarriers = 32
    n_rx = 16
    architectures = ["TH", "HP", "FD"]
    input_power_w = [0.01, 0.0316, 0.1]
    dma.m = 2
    catalog.phase_shifter_kind = "passive"
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .architecture import ALL_ARCHITECTURES, Architecture, ArchitectureSpec, equal_aperture_spec
from .channel import NORMALIZATION_MODES, ArrayGeometry, PulseShape
from .metrics import noise_variance
from .power import ComponentCatalog
from .precoding import POWER_MODES, DmaModel

DEFAULT_INPUT_POWER_W = (0.01, 0.01778279410038923, 0.03162277660168379, 0.05623413251903491, 0.1)


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class ExperimentConfig:
    carrier_freq_hz: float = 15e9
    n_subcarriers: int = 128
    n_taps: int | None = None  # None -> n_subcarriers
    n_paths: int = 2
    n_streams: int = 2
    n_rx: int = 64
    rx_spacing_wl: float = 0.5
    x_spacing_wl: float = 0.25
    y_spacing_wl: float = 0.5
    n_rad: int = 64
    dma_m: int = 2
    dma_feeds: int = 2
    dma_attenuation: float = 0.05
    dma_phase_advance: float = 0.0
    n_rf_hybrid: int = 4
    symbol_duration: float = 50e-3
    rolloff: float = 1.0
    channel_normalization: str = "expected"
    architectures: tuple[str, ...] = tuple(a.value for a in ALL_ARCHITECTURES)
    input_power_w: tuple[float, ...] = DEFAULT_INPUT_POWER_W
    snr_db: float = 20.0
    reference_power_w: float = 1.0
    noise_var: float | None = None
    n_trials: int = 100
    seed: int = 0
    power_mode: str = "AOP"
    catalog: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "architectures",
                           tuple(str(a).upper() for a in self.architectures))
        object.__setattr__(self, "input_power_w", tuple(float(p) for p in self.input_power_w))
        object.__setattr__(self, "power_mode", str(self.power_mode).upper())
        self.validate()

    def validate(self) -> None:
        for name in ("n_subcarriers", "n_paths", "n_streams", "n_rx", "n_rad", "dma_m",
                     "dma_feeds", "n_rf_hybrid", "n_trials"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value!r}")
        if self.n_taps is not None and (not isinstance(self.n_taps, int) or self.n_taps < 1):
            raise ConfigError("n_taps", f"must be a positive integer, got {self.n_taps!r}")
        for name in ("carrier_freq_hz", "rx_spacing_wl", "x_spacing_wl", "y_spacing_wl",
                     "symbol_duration", "reference_power_w"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be a positive number, got {value!r}")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ConfigError("rolloff", "must lie in [0, 1]")
        if self.dma_attenuation < 0:
            raise ConfigError("dma.attenuation", "must be non-negative")
        if self.n_rad % (self.dma_feeds * self.dma_m):
            raise ConfigError("n_rad", f"{self.n_rad} radiators do not split into "
                                       f"{self.dma_feeds} feeds x {self.dma_m} DMAs")
        if self.channel_normalization not in NORMALIZATION_MODES:
            raise ConfigError("channel_normalization", f"must be one of {NORMALIZATION_MODES}")
        if self.power_mode not in POWER_MODES:
            raise ConfigError("power_mode", f"must be one of {POWER_MODES}")
        if not self.architectures:
            raise ConfigError("architectures", "at least one architecture is required")
        valid = {a.value for a in ALL_ARCHITECTURES}
        for i, a in enumerate(self.architectures):
            if a not in valid:
                raise ConfigError(f"architectures[{i}]", f"unknown architecture {a!r}")
        if len(set(self.architectures)) != len(self.architectures):
            raise ConfigError("architectures", "duplicate entries")
        if not self.input_power_w:
            raise ConfigError("input_power_w", "grid must not be empty")
        for i, p in enumerate(self.input_power_w):
            if not (math.isfinite(p) and p > 0):
                raise ConfigError(f"input_power_w[{i}]", f"must be positive, got {p!r}")
        if self.noise_var is not None and not self.noise_var > 0:
            raise ConfigError("noise_var", "must be positive")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed", "must be a non-negative integer")
        try:
            self.component_catalog()
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError("catalog", str(exc)) from None
        for a in self.architectures:
            try:
                self.architecture_spec(a)
            except ValueError as exc:
                raise ConfigError(f"architectures[{a}]", str(exc)) from None

    # derived objects

    def geometry(self) -> ArrayGeometry:
        n_uc = self.n_rad // (self.dma_feeds * self.dma_m)
        return ArrayGeometry.from_carrier(
            self.carrier_freq_hz, self.n_rx, n_x=n_uc, n_y=self.dma_feeds * self.dma_m,
            rx_spacing_wl=self.rx_spacing_wl, x_spacing_wl=self.x_spacing_wl,
            y_spacing_wl=self.y_spacing_wl,
        )

    def pulse_shape(self) -> PulseShape:
        taps = self.n_subcarriers if self.n_taps is None else self.n_taps
        return PulseShape(self.symbol_duration, self.rolloff, taps, self.n_subcarriers)

    def architecture_spec(self, kind: str | Architecture) -> ArchitectureSpec:
        return equal_aperture_spec(kind, self.n_rad, n_feeds=self.dma_feeds, m_dma=self.dma_m,
                                   n_rf_hybrid=self.n_rf_hybrid, n_s=self.n_streams)

    def dma_model(self, spec: ArchitectureSpec) -> DmaModel | None:
        if not spec.uses_dma:
            return None
        return DmaModel.for_spec(spec, self.dma_attenuation, self.dma_phase_advance)

    def component_catalog(self) -> ComponentCatalog:
        return ComponentCatalog().with_overrides(self.catalog)

    def resolved_noise_var(self) -> float:
        if self.noise_var is not None:
            return float(self.noise_var)
        return noise_variance(self.reference_power_w, self.n_subcarriers, self.snr_db)

    def with_overrides(self, **changes: Any) -> "ExperimentConfig":
        return replace(self, **changes)


def _flatten(tree: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in tree.items():
        path = f"{prefix}{key}"
        if isinstance(value, Mapping) and path != "catalog":
            flat.update(_flatten(value, path + "."))
        else:
            flat[path] = value
    return flat


def config_from_mapping(tree: Mapping[str, Any]) -> ExperimentConfig:
    names = {f.name for f in fields(ExperimentConfig)}
    kwargs: dict[str, Any] = {}
    catalog: dict[str, Any] = {}
    for path, value in _flatten(tree).items():
        if path.startswith("catalog."):
            catalog[path[len("catalog."):]] = value
            continue
        if path == "catalog":
            catalog.update(value)
            continue
        name = path.replace(".", "_")
        if name not in names:
            raise ConfigError(path, "unknown configuration key")
        if name in ("architectures", "input_power_w"):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(path, "must be a list")
            value = tuple(value)
        kwargs[name] = value
    if catalog:
        kwargs["catalog"] = catalog
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("<config>", str(exc)) from None


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            tree = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"malformed TOML: {exc}") from None
    return config_from_mapping(tree)
