"""Spectral and energy efficiency of a designed link."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization


@dataclass(frozen=True)
class LinkResult:
    spectral_efficiency: float
    noise_var: float
    transmit_power: float
    consumed_power: float
    n_subcarriers: int = 1

    @property
    def energy_efficiency(self) -> float:
        return energy_efficiency(self.spectral_efficiency, self.consumed_power)

    @property
    def se_per_subcarrier(self) -> float:
        return self.spectral_efficiency / self.n_subcarriers


def _as_stack(channel: ChannelRealization | np.ndarray) -> np.ndarray:
    h = channel.per_subcarrier if isinstance(channel, ChannelRealization) else np.asarray(channel)
    return h[None] if h.ndim == 2 else h


def per_subcarrier_rates(channel: ChannelRealization | np.ndarray, precoders: np.ndarray,
                         noise_var: float) -> np.ndarray:
    """``log2 det(I + H F F^H H^H / noise_var)`` for every subcarrier.

    Uses the Sylvester identity to factor whichever Gram matrix is smaller,
    then a batched Cholesky factorization.
    """
    if not noise_var > 0:
        raise ValueError("noise_var must be positive")
    h = _as_stack(channel)
    f = np.asarray(precoders)
    f = f[None] if f.ndim == 2 else f
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(f))):
        raise ValueError("channel and precoder entries must be finite")
    if f.shape[0] != h.shape[0] or f.shape[1] != h.shape[2]:
        raise ValueError(f"precoder stack {f.shape} incompatible with channel {h.shape}")
    a = h @ f / math.sqrt(noise_var)
    a_h = a.conj().swapaxes(-1, -2)
    gram = a_h @ a if a.shape[2] <= a.shape[1] else a @ a_h
    m = np.eye(gram.shape[-1]) + gram
    chol = np.linalg.cholesky(m)
    diag = np.real(np.diagonal(chol, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log2(diag), axis=-1)


def spectral_efficiency(channel: ChannelRealization | np.ndarray, precoders: np.ndarray,
                        noise_var: float) -> float:
    """Sum over subcarriers of the Gaussian-input mutual information (bits/s/Hz)."""
    return max(0.0, float(np.sum(per_subcarrier_rates(channel, precoders, noise_var))))


def energy_efficiency(se: float, consumed: float) -> float:
    if not consumed > 0:
        raise ValueError("consumed power must be positive")
    return se / consumed


def noise_variance(reference_power: float, n_subcarriers: int, snr_db: float) -> float:
    """Noise variance giving ``snr_db`` per subcarrier at ``reference_power``."""
    return reference_power / (n_subcarriers * 10.0 ** (snr_db / 10.0))
