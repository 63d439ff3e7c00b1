"""Wideband geometric MIMO channel between a planar transmit aperture and a
linear receive array.

Transmit radiators are indexed x-fastest: radiator ``r = iy * n_x + ix``.
Every precoder in :mod:`trihybrid.precoding` relies on this ordering to map
contiguous blocks of columns onto waveguides and subarrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

NORMALIZATION_MODES = ("expected", "strict", "none")


@dataclass(frozen=True)
class ArrayGeometry:
    """Receive ULA plus transmit UPA in the xy plane.

    Attributes
    ----------
    n_rx : int
        Receive antennas.
    rx_spacing : float
        Receive element spacing in meters.
    n_x, n_y : int
        Transmit radiators along x (unit cells per waveguide) and along y
        (waveguide rows).
    x_spacing, y_spacing : float
        Transmit spacings in meters.
    wavelength : float
        Carrier wavelength in meters.
    """

    n_rx: int
    rx_spacing: float
    n_x: int
    n_y: int
    x_spacing: float
    y_spacing: float
    wavelength: float

    def __post_init__(self):
        for name in ("n_rx", "n_x", "n_y"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("rx_spacing", "x_spacing", "y_spacing", "wavelength"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite length")

    @classmethod
    def from_carrier(
        cls,
        carrier_freq_hz: float,
        n_rx: int,
        n_x: int,
        n_y: int,
        rx_spacing_wl: float = 0.5,
        x_spacing_wl: float = 0.25,
        y_spacing_wl: float = 0.5,
    ) -> "ArrayGeometry":
        """Build a geometry with spacings given in wavelengths."""
        lam = SPEED_OF_LIGHT / carrier_freq_hz
        return cls(
            n_rx=n_rx,
            rx_spacing=rx_spacing_wl * lam,
            n_x=n_x,
            n_y=n_y,
            x_spacing=x_spacing_wl * lam,
            y_spacing=y_spacing_wl * lam,
            wavelength=lam,
        )

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def n_tx(self) -> int:
        """Total transmit radiators."""
        return self.n_x * self.n_y


@dataclass(frozen=True)
class PathComponent:
    gain: complex
    delay: float
    aoa_elevation: float
    aoa_azimuth: float
    aod_elevation: float
    aod_azimuth: float

    def __post_init__(self):
        if not self.delay >= 0:
            raise ValueError("path delay must be non-negative")
        angles = (self.aoa_elevation, self.aoa_azimuth, self.aod_elevation, self.aod_azimuth)
        if not all(math.isfinite(a) for a in angles):
            raise ValueError("path angles must be finite")


@dataclass(frozen=True)
class PulseShape:
    """Raised-cosine pulse sampled on ``n_taps`` symbol-spaced taps."""

    symbol_duration: float
    rolloff: float
    n_taps: int
    n_subcarriers: int

    def __post_init__(self):
        if self.n_taps < 1 or self.n_subcarriers < 1:
            raise ValueError("n_taps and n_subcarriers must be >= 1")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ValueError("rolloff must lie in [0, 1]")
        if not self.symbol_duration > 0:
            raise ValueError("symbol_duration must be positive")


@dataclass(frozen=True)
class ChannelRealization:
    """Per-subcarrier channel matrices stacked as ``(K, n_rx, n_tx)``."""

    per_subcarrier: np.ndarray
    n_paths: int

    def __post_init__(self):
        h = self.per_subcarrier
        if h.ndim != 3:
            raise ValueError("per_subcarrier must have shape (K, n_rx, n_tx)")
        if not np.all(np.isfinite(h)):
            raise ValueError("channel entries must be finite")

    @property
    def n_subcarriers(self) -> int:
        return self.per_subcarrier.shape[0]

    @property
    def n_rx(self) -> int:
        return self.per_subcarrier.shape[1]

    @property
    def n_tx(self) -> int:
        return self.per_subcarrier.shape[2]

    def scaled(self, factor: complex) -> "ChannelRealization":
        return ChannelRealization(self.per_subcarrier * factor, self.n_paths)


def rx_steering_vector(elevation: float, azimuth: float, geometry: ArrayGeometry) -> np.ndarray:
    """Unit-norm response of the receive ULA."""
    n = np.arange(geometry.n_rx)
    phase = geometry.wavenumber * geometry.rx_spacing * math.sin(elevation) * math.cos(azimuth)
    return np.exp(1j * n * phase) / math.sqrt(geometry.n_rx)


def tx_upa_steering_vector(elevation: float, azimuth: float, geometry: ArrayGeometry) -> np.ndarray:
    """Unit-norm response of the transmit UPA, x-fastest ordering."""
    k0 = geometry.wavenumber
    st = math.sin(elevation)
    ax = np.exp(1j * np.arange(geometry.n_x) * k0 * geometry.x_spacing * st * math.cos(azimuth))
    ay = np.exp(1j * np.arange(geometry.n_y) * k0 * geometry.y_spacing * st * math.sin(azimuth))
    # kron(ay, ax) keeps x as the fast index
    return np.kron(ay, ax) / math.sqrt(geometry.n_tx)


def raised_cosine(t: np.ndarray, symbol_duration: float, rolloff: float) -> np.ndarray:
    """Raised-cosine impulse response with unit peak at ``t = 0``."""
    x = np.asarray(t, dtype=float) / symbol_duration
    # np.sinc leaves ~1e-17 at nonzero integers; Nyquist zeros must be exact
    zero_crossing = (x != 0) & (x == np.round(x))
    if rolloff == 0.0:
        return np.where(zero_crossing, 0.0, np.sinc(x))
    den = 1.0 - (2.0 * rolloff * x) ** 2
    singular = np.abs(den) < 1e-10
    safe_den = np.where(singular, 1.0, den)
    out = np.sinc(x) * np.cos(np.pi * rolloff * x) / safe_den
    limit = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * rolloff))
    out = np.where(singular, limit, out)
    return np.where(zero_crossing, 0.0, out)


def pulse_freq_responses(delays: Sequence[float], shape: PulseShape) -> np.ndarray:
    """Filter responses for several delays at once, shape ``(len(delays), K)``."""
    tau = np.asarray(delays, dtype=float).reshape(-1)
    d = np.arange(shape.n_taps)
    taps = raised_cosine(d[None, :] * shape.symbol_duration - tau[:, None],
                         shape.symbol_duration, shape.rolloff)
    k = np.arange(shape.n_subcarriers)
    dft = np.exp(-2j * np.pi * np.outer(d, k) / shape.n_subcarriers)
    return taps @ dft


def pulse_freq_response(delay: float, shape: PulseShape, subcarrier: int) -> complex:
    if not 0 <= subcarrier < shape.n_subcarriers:
        raise IndexError(f"subcarrier {subcarrier} out of range [0, {shape.n_subcarriers})")
    return complex(pulse_freq_responses([delay], shape)[0, subcarrier])


def expected_pulse_power(shape: PulseShape, nodes_per_symbol: int = 48) -> np.ndarray:
    """Mean of ``|omega_tau[k]|**2`` for a delay uniform on ``[0, (D-1) Ts]``.

    Evaluated with Gauss-Legendre quadrature on each symbol interval; the
    integrand is smooth so the result is accurate to near machine precision.
    Returns one value per subcarrier.
    """
    if shape.n_taps == 1:
        return np.ones(shape.n_subcarriers)
    x, w = np.polynomial.legendre.leggauss(nodes_per_symbol)
    starts = np.arange(shape.n_taps - 1)
    # nodes mapped from [-1, 1] onto each [d, d+1], in units of Ts
    tau = (starts[:, None] + 0.5 * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * w, starts.size)
    omega = pulse_freq_responses(tau * shape.symbol_duration, shape)
    return weights @ (np.abs(omega) ** 2) / (shape.n_taps - 1)


def generate_channel(
    paths: Sequence[PathComponent],
    geometry: ArrayGeometry,
    shape: PulseShape,
    power_profile: np.ndarray | None = None,
) -> ChannelRealization:
    """Sum the multipath components into ``K`` channel matrices.

    Parameters
    ----------
    paths : sequence of PathComponent
        At least one path.
    geometry, shape
        Array and pulse description.
    power_profile : ndarray, optional
        Per-subcarrier mean filter power. When given, every filter response
        is divided by ``sqrt(power_profile[k])`` so that the channel has
        mean squared Frobenius norm ``n_tx * n_rx`` on each subcarrier.
        ``None`` returns the plain sum.
    """
    if len(paths) == 0:
        raise ValueError("at least one path component is required")
    n_paths = len(paths)
    gains = np.array([p.gain for p in paths], dtype=complex)
    omega = pulse_freq_responses([p.delay for p in paths], shape)
    if power_profile is not None:
        profile = np.asarray(power_profile, dtype=float)
        if profile.shape != (shape.n_subcarriers,) or np.any(profile <= 0):
            raise ValueError("power_profile must hold one positive value per subcarrier")
        omega = omega / np.sqrt(profile)[None, :]
    a_r = np.stack([rx_steering_vector(p.aoa_elevation, p.aoa_azimuth, geometry) for p in paths])
    a_t = np.stack([tx_upa_steering_vector(p.aod_elevation, p.aod_azimuth, geometry) for p in paths])
    coeff = math.sqrt(geometry.n_tx * geometry.n_rx / n_paths) * gains[:, None] * omega
    h = np.einsum("lk,lr,lt->krt", coeff, a_r, a_t.conj())
    return ChannelRealization(h, n_paths)


def sample_paths(n_paths: int, rng: np.random.Generator, shape: PulseShape) -> list[PathComponent]:
    """Draw i.i.d. path components.

    Gains are CN(0, 1), elevations uniform on ``[0, pi/2]``, azimuths uniform
    on ``[0, 2 pi)`` (AoA and AoD alike) and delays uniform on
    ``[0, (D - 1) Ts]``.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    gains = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / math.sqrt(2.0)
    max_delay = (shape.n_taps - 1) * shape.symbol_duration
    delays = rng.uniform(0.0, max_delay, n_paths) if max_delay > 0 else np.zeros(n_paths)
    el = rng.uniform(0.0, math.pi / 2, (n_paths, 2))
    az = rng.uniform(0.0, 2 * math.pi, (n_paths, 2))
    return [
        PathComponent(
            gain=complex(gains[i]),
            delay=float(delays[i]),
            aoa_elevation=float(el[i, 0]),
            aoa_azimuth=float(az[i, 0]),
            aod_elevation=float(el[i, 1]),
            aod_azimuth=float(az[i, 1]),
        )
        for i in range(n_paths)
    ]


def random_channel(
    rng: np.random.Generator,
    n_paths: int,
    geometry: ArrayGeometry,
    shape: PulseShape,
    normalization: str = "expected",
    power_profile: np.ndarray | None = None,
) -> ChannelRealization:
    """Sample paths and build one channel realization.

    ``normalization`` selects how ``E ||H[k]||_F^2 = n_tx * n_rx`` is met:

    ``"expected"``
        divide each subcarrier's filter response by its mean power under the
        default delay law (holds in expectation for every ``k``);
    ``"strict"``
        rescale this realization so the subcarrier-averaged squared norm is
        exactly ``n_tx * n_rx``;
    ``"none"``
        the plain multipath sum.

    ``power_profile`` can be passed to reuse a precomputed
    :func:`expected_pulse_power` across many draws.
    """
    if normalization not in NORMALIZATION_MODES:
        raise ValueError(f"normalization must be one of {NORMALIZATION_MODES}")
    paths = sample_paths(n_paths, rng, shape)
    if normalization == "expected":
        profile = expected_pulse_power(shape) if power_profile is None else power_profile
        return generate_channel(paths, geometry, shape, power_profile=profile)
    channel = generate_channel(paths, geometry, shape)
    if normalization == "strict":
        h = channel.per_subcarrier
        mean_power = np.sum(np.abs(h) ** 2) / h.shape[0]
        if mean_power > 0:
            channel = channel.scaled(math.sqrt(geometry.n_tx * geometry.n_rx / mean_power))
    return channel
