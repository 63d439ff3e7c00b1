"""Digital, analog and DMA precoder design for every architecture.

The stages are designed one after another rather than jointly:

1. each DMA feed gets the Lorentzian projection of the dominant eigenvector
   of its slot covariance;
2. the analog network is designed on the DMA-reduced channel (or on the raw
   channel for plain arrays);
3. the digital precoder waterfills over the eigenmodes of the channel seen
   through the fixed stages, whitened so that the waterfilled power equals
   the constrained power exactly.

Stacks of per-subcarrier matrices are ndarrays with the subcarrier on axis 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .architecture import Architecture, ArchitectureSpec
from .channel import ChannelRealization

POWER_MODES = ("AOP", "AIP")


@dataclass(frozen=True)
class DmaModel:
    """Waveguide of one feed: ``n_dma_per_feed`` DMAs of ``n_unit_cells`` slots.

    The guided wave decays by ``waveguide_attenuation`` nepers and advances
    by ``waveguide_phase_advance`` radians per unit cell, continuously over
    the ``n_dma_per_feed * n_unit_cells`` slots of the feed.
    """

    n_unit_cells: int
    n_dma_per_feed: int = 1
    waveguide_attenuation: float = 0.05
    waveguide_phase_advance: float = 0.0

    def __post_init__(self):
        if self.n_unit_cells < 1 or self.n_dma_per_feed < 1:
            raise ValueError("DMA dimensions must be >= 1")
        if self.waveguide_attenuation < 0:
            raise ValueError("waveguide_attenuation must be >= 0")

    @classmethod
    def for_spec(cls, spec: ArchitectureSpec, attenuation: float = 0.05,
                 phase_advance: float = 0.0) -> "DmaModel":
        return cls(spec.n_uc, spec.m_dma, attenuation, phase_advance)

    @property
    def length(self) -> int:
        return self.n_unit_cells * self.n_dma_per_feed


@dataclass(frozen=True)
class LorentzianWeight:
    phase: float

    @property
    def value(self) -> complex:
        return lorentzian_weight(self.phase)


@dataclass(frozen=True)
class DmaPrecoder:
    beamformers: tuple[np.ndarray, ...]

    @property
    def matrix(self) -> np.ndarray:
        return block_diag(*[f[:, None] for f in self.beamformers])

    @property
    def n_feeds(self) -> int:
        return len(self.beamformers)


@dataclass(frozen=True)
class AnalogPrecoder:
    matrix: np.ndarray
    connectivity: str = "none"

    def __post_init__(self):
        if self.connectivity not in ("fully_connected", "partially_connected", "none"):
            raise ValueError(f"unknown connectivity {self.connectivity!r}")


@dataclass(frozen=True)
class TriHybridPrecoder:
    """``F_dma @ F_ana @ F_dig[k]`` with the stages kept separate.

    ``dma`` is None for plain arrays, in which case the antenna stage is the
    identity.
    """

    digital: np.ndarray
    analog: AnalogPrecoder
    dma: DmaPrecoder | None = None
    kind: Architecture | None = None
    info: dict = field(default_factory=dict, compare=False)

    @property
    def antenna_input(self) -> np.ndarray:
        return self.analog.matrix @ self.digital

    @property
    def effective(self) -> np.ndarray:
        x = self.antenna_input
        return x if self.dma is None else self.dma.matrix @ x

    def aip_power(self) -> float:
        return float(np.sum(np.abs(self.antenna_input) ** 2))

    def aop_power(self) -> float:
        return float(np.sum(np.abs(self.effective) ** 2))

    @property
    def degenerate(self) -> bool:
        return not np.any(self.digital)


def _stack(channel: ChannelRealization | np.ndarray) -> np.ndarray:
    h = channel.per_subcarrier if isinstance(channel, ChannelRealization) else np.asarray(channel)
    return h[None] if h.ndim == 2 else h


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    idx = np.flatnonzero(mags > 1e-12 * mags.max()) if mags.max() > 0 else []
    if len(idx) == 0:
        return v
    ref = v[idx[0]]
    return v * (np.conj(ref) / abs(ref))


def _inv_sqrt_psd(gram: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    w, v = np.linalg.eigh(gram)
    keep = w > rtol * max(w.max(), 0.0)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.conj().T


def waveguide_coefficients(model: DmaModel) -> np.ndarray:
    m = np.arange(model.length)
    return np.exp(-(model.waveguide_attenuation + 1j * model.waveguide_phase_advance) * m)


def lorentzian_weight(phase):
    """Point on the Lorentzian circle ``(-j + exp(j phase)) / 2``."""
    return (-1j + np.exp(1j * np.asarray(phase, dtype=float))) / 2.0


def transmit_covariance(channel: ChannelRealization | np.ndarray) -> np.ndarray:
    """``(1/K) sum_k H[k]^H H[k]``."""
    h = _stack(channel)
    r = np.einsum("kri,krj->ij", h.conj(), h) / h.shape[0]
    return 0.5 * (r + r.conj().T)


def subarray_covariance(channel: ChannelRealization | np.ndarray, feed_index: int,
                        feed_length: int) -> np.ndarray:
    """Covariance of the columns belonging to one feed (or subarray).

    Feed ``n`` owns the contiguous columns ``[n * feed_length, (n + 1) * feed_length)``.
    """
    h = _stack(channel)
    n_feeds, rem = divmod(h.shape[2], feed_length)
    if rem:
        raise ValueError(f"{h.shape[2]} columns do not split into feeds of {feed_length}")
    if not 0 <= feed_index < n_feeds:
        raise IndexError(f"feed_index {feed_index} out of range [0, {n_feeds})")
    cols = slice(feed_index * feed_length, (feed_index + 1) * feed_length)
    return transmit_covariance(h[:, :, cols])


def dominant_eigenvectors(cov: np.ndarray, n: int, rtol: float = 1e-12) -> np.ndarray:
    """Top-``n`` unit eigenvectors of a Hermitian matrix, as columns.

    Eigenvalues equal to within ``rtol`` keep the order returned by the
    (deterministic) eigendecomposition, so ties go to the lowest index.
    Each column's first nonzero entry is made real-positive. A zero matrix
    yields canonical basis vectors.
    """
    cov = np.asarray(cov)
    dim = cov.shape[0]
    w, v = np.linalg.eigh(cov)
    scale = np.max(np.abs(w)) if w.size else 0.0
    if scale == 0.0:
        return np.eye(dim, n, dtype=complex)
    # quantize so that numerical ties sort stably
    key = np.round(w / (scale * rtol)) if rtol > 0 else w
    order = np.argsort(-key, kind="stable")[:n]
    return np.stack([_fix_phase(v[:, i]) for i in order], axis=1)


def principal_eigenvector(cov: np.ndarray) -> np.ndarray:
    return dominant_eigenvectors(cov, 1)[:, 0]


def lorentzian_map(target: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Map the phases of ``target`` onto Lorentzian slot weights behind ``eta``."""
    target = np.asarray(target)
    eta = np.asarray(eta)
    if target.shape != eta.shape:
        raise ValueError(f"length mismatch: target {target.shape} vs eta {eta.shape}")
    return (eta * np.exp(1j * np.angle(target)) - eta * 1j) / 2.0


def assemble_dma_precoder(beamformers: Sequence[np.ndarray]) -> DmaPrecoder:
    vecs = tuple(np.asarray(f, dtype=complex).reshape(-1) for f in beamformers)
    if not vecs:
        raise ValueError("need at least one DMA beamformer")
    if len({f.size for f in vecs}) != 1:
        raise ValueError("all DMA beamformers must have the same length")
    return DmaPrecoder(vecs)


def water_level(gains: np.ndarray, total_power: float, tol: float = 1e-15) -> float:
    """Water level ``mu`` with ``sum(max(0, mu - 1/g)) == total_power``.

    Bisection brackets the level, after which it is solved exactly on the
    resulting active set.
    """
    g = np.asarray(gains, dtype=float).ravel()
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ValueError("gains must be finite and non-negative")
    if not total_power > 0:
        raise ValueError("total_power must be positive")
    if not np.any(g > 0):
        raise ValueError("at least one gain must be positive")
    floor = np.full(g.shape, np.inf)
    floor[g > 0] = 1.0 / g[g > 0]

    lo = floor.min()
    hi = lo + total_power
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(mid - floor, 0.0)) > total_power:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * hi:
            break

    active = floor < hi
    while True:
        mu = (total_power + floor[active].sum()) / active.sum()
        drop = active & (floor >= mu)
        if not drop.any():
            return float(mu)
        active &= ~drop


def waterfill(gains: np.ndarray, total_power: float) -> np.ndarray:
    """Optimal powers ``max(0, mu - 1/g_i)`` for parallel channels with SNR slopes ``g``."""
    g = np.asarray(gains, dtype=float)
    mu = water_level(g, total_power)
    p = np.zeros(g.shape)
    pos = g > 0
    p[pos] = np.maximum(mu - 1.0 / g[pos], 0.0)
    return p


def design_digital_precoder(
    effective_channel: np.ndarray,
    n_streams: int,
    total_power: float,
    noise_var: float,
    gram: np.ndarray | None = None,
) -> np.ndarray:
    """Eigenmode precoder with power waterfilled jointly over all subcarriers.

    Parameters
    ----------
    effective_channel : ndarray, shape (K, n_rx, n_ports)
        Channel seen by the digital ports.
    n_streams : int
        Modes retained per subcarrier (the ``n_streams`` strongest).
    total_power : float
        Budget on ``sum_k ||B F[k]||_F^2`` where ``B^H B = gram``.
    noise_var : float
    gram : ndarray, optional
        Gram matrix of the stages between the digital ports and the point
        where power is measured. Defaults to the identity.

    Returns
    -------
    ndarray, shape (K, n_ports, s)
        ``s = min(n_streams, n_rx, n_ports)``. All zeros if the channel is.
    """
    h = _stack(effective_channel)
    k, n_rx, n_ports = h.shape
    whiten = np.eye(n_ports) if gram is None else _inv_sqrt_psd(np.asarray(gram))
    hw = h @ whiten
    _, s, vh = np.linalg.svd(hw, full_matrices=False)
    n_keep = min(n_streams, n_rx, n_ports)
    gains = s[:, :n_keep] ** 2 / noise_var
    if not np.any(gains > 0):
        return np.zeros((k, n_ports, n_keep), dtype=complex)
    p = waterfill(gains.ravel(), total_power).reshape(k, n_keep)
    v = vh.conj().swapaxes(1, 2)[:, :, :n_keep]
    return whiten @ (v * np.sqrt(p)[:, None, :])


def design_analog_partially_connected(channel: ChannelRealization | np.ndarray,
                                      spec: ArchitectureSpec) -> AnalogPrecoder:
    """Block-diagonal phase-only precoder, one block per RF chain.

    Block ``l`` carries the phases of the dominant eigenvector of subarray
    ``l``'s covariance, scaled by ``1/sqrt(n_sub)``.
    """
    h = _stack(channel)
    if h.shape[2] != spec.n_t:
        raise ValueError(f"channel has {h.shape[2]} ports, spec expects {spec.n_t}")
    if spec.n_t % spec.n_rf:
        raise ValueError(f"n_t ({spec.n_t}) not divisible by n_rf ({spec.n_rf})")
    n_sub = spec.n_t // spec.n_rf
    blocks = []
    for ell in range(spec.n_rf):
        v = principal_eigenvector(subarray_covariance(h, ell, n_sub))
        blocks.append(np.exp(1j * np.angle(v))[:, None] / math.sqrt(n_sub))
    return AnalogPrecoder(block_diag(*blocks), "partially_connected")


def design_analog_fully_connected(channel: ChannelRealization | np.ndarray,
                                  spec: ArchitectureSpec) -> AnalogPrecoder:
    """Phase projection of the ``n_rf`` dominant transmit eigenvectors.

    A low-complexity baseline, not an optimal fully-connected design.
    """
    h = _stack(channel)
    if h.shape[2] != spec.n_t:
        raise ValueError(f"channel has {h.shape[2]} ports, spec expects {spec.n_t}")
    u = dominant_eigenvectors(transmit_covariance(h), spec.n_rf)
    return AnalogPrecoder(np.exp(1j * np.angle(u)) / math.sqrt(spec.n_t), "fully_connected")


def design_dma_precoder(channel: ChannelRealization | np.ndarray, spec: ArchitectureSpec,
                        dma: DmaModel) -> DmaPrecoder:
    """Lorentzian-mapped dominant eigenvector for every feed."""
    h = _stack(channel)
    if dma.length != spec.feed_length:
        raise ValueError(f"DMA model has {dma.length} slots per feed, spec needs {spec.feed_length}")
    if h.shape[2] != spec.n_t * spec.feed_length:
        raise ValueError(f"channel has {h.shape[2]} radiators, {spec.kind.value} needs "
                         f"{spec.n_t * spec.feed_length}")
    eta = waveguide_coefficients(dma)
    beams = [lorentzian_map(principal_eigenvector(subarray_covariance(h, n, dma.length)), eta)
             for n in range(spec.n_t)]
    return assemble_dma_precoder(beams)


def enforce_power_constraint(precoder: TriHybridPrecoder, budget: float,
                             mode: str = "AOP") -> TriHybridPrecoder:
    """Scale the digital stage so the AOP or AIP power equals ``budget``."""
    mode = mode.upper()
    if mode not in POWER_MODES:
        raise ValueError(f"mode must be one of {POWER_MODES}")
    if not budget > 0:
        raise ValueError("budget must be positive")
    current = precoder.aop_power() if mode == "AOP" else precoder.aip_power()
    if current == 0.0:
        raise ValueError("cannot scale a zero precoder to a positive budget")
    if abs(current - budget) <= 1e-9 * budget:
        return precoder
    scale = math.sqrt(budget / current)
    return TriHybridPrecoder(precoder.digital * scale, precoder.analog, precoder.dma,
                             precoder.kind, dict(precoder.info))


def design_precoders(
    channel: ChannelRealization | np.ndarray,
    spec: ArchitectureSpec,
    dma: DmaModel | None,
    total_power: float,
    noise_var: float,
    power_mode: str = "AOP",
) -> TriHybridPrecoder:
    """Design every stage of ``spec`` for ``channel``.

    ``dma`` may be None for plain arrays (and defaults to
    :meth:`DmaModel.for_spec` for DMA architectures). A zero channel yields
    a zero precoder with ``info["degenerate"] = True``.
    """
    power_mode = power_mode.upper()
    if power_mode not in POWER_MODES:
        raise ValueError(f"power_mode must be one of {POWER_MODES}")
    h = _stack(channel)
    kind = spec.kind
    f_dma = None
    dma_pre = None

    if spec.uses_dma:
        dma = DmaModel.for_spec(spec) if dma is None else dma
        dma_pre = design_dma_precoder(h, spec, dma)
        f_dma = dma_pre.matrix
        h_ports = h @ f_dma
    else:
        if h.shape[2] != spec.n_t:
            raise ValueError(f"channel has {h.shape[2]} radiators, {kind.value} needs {spec.n_t}")
        h_ports = h

    if kind is Architecture.TH:
        # column normalization makes the subarray eigenvectors blind to DMA efficiency
        norms = np.linalg.norm(f_dma, axis=0)
        scaled = h_ports / np.where(norms > 0, norms, 1.0)
        analog = design_analog_partially_connected(scaled, spec)
    elif kind in (Architecture.A, Architecture.HP):
        analog = design_analog_partially_connected(h_ports, spec)
    elif kind is Architecture.HF:
        analog = design_analog_fully_connected(h_ports, spec)
    else:
        analog = AnalogPrecoder(np.eye(spec.n_t, dtype=complex), "none")

    f_ana = analog.matrix
    measured = f_ana if (power_mode == "AIP" or f_dma is None) else f_dma @ f_ana
    gram = measured.conj().T @ measured
    digital = design_digital_precoder(h_ports @ f_ana, spec.n_streams, total_power, noise_var, gram)

    pre = TriHybridPrecoder(digital, analog, dma_pre, kind)
    if pre.degenerate:
        pre.info["degenerate"] = True
        return pre
    return enforce_power_constraint(pre, total_power, power_mode)
