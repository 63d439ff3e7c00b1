"""Transmitter architectures and their structural dimensions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Architecture(str, Enum):
    DO = "DO"  # DMA-only
    DH = "DH"  # DMA-digital hybrid
    TH = "TH"  # tri-hybrid
    A = "A"  # fully analog
    HP = "HP"  # partially-connected hybrid
    HF = "HF"  # fully-connected hybrid
    FD = "FD"  # fully digital

    @property
    def uses_dma(self) -> bool:
        return self in (Architecture.DO, Architecture.DH, Architecture.TH)


ALL_ARCHITECTURES = tuple(Architecture)


@dataclass(frozen=True)
class ArchitectureSpec:
    """Dimensions of one transmitter.

    Attributes
    ----------
    kind : Architecture
    n_t : int
        Antenna ports: antennas for plain arrays, DMA feeds otherwise.
    n_rf : int
        RF chains.
    n_uc : int
        Unit cells per DMA (ignored by plain arrays).
    m_dma : int
        DMAs excited by each feed (ignored by plain arrays).
    n_s : int
        Requested data streams.
    """

    kind: Architecture
    n_t: int
    n_rf: int
    n_uc: int = 1
    m_dma: int = 1
    n_s: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", Architecture(self.kind))
        for name in ("n_t", "n_rf", "n_uc", "m_dma", "n_s"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        k = self.kind
        if self.n_rf > self.n_t:
            raise ValueError(f"{k.value}: n_rf ({self.n_rf}) exceeds n_t ({self.n_t})")
        if k in (Architecture.DO, Architecture.A) and self.n_rf != 1:
            raise ValueError(f"{k.value} has a single RF chain, got n_rf={self.n_rf}")
        if k is Architecture.DO and (self.n_t != 1 or self.m_dma != 1):
            raise ValueError("DO drives exactly one DMA (n_t = m_dma = 1)")
        if k is Architecture.DH and (self.n_rf != self.n_t or self.m_dma != 1):
            raise ValueError("DH connects each RF chain to one DMA (n_rf = n_t, m_dma = 1)")
        if k is Architecture.FD and self.n_rf != self.n_t:
            raise ValueError("FD needs one RF chain per antenna (n_rf = n_t)")
        if k in (Architecture.HP, Architecture.TH) and self.n_t % self.n_rf:
            raise ValueError(f"{k.value}: n_t ({self.n_t}) must be divisible by n_rf ({self.n_rf})")

    @property
    def uses_dma(self) -> bool:
        return self.kind.uses_dma

    @property
    def feed_length(self) -> int:
        """Radiators behind one antenna port."""
        return self.m_dma * self.n_uc if self.uses_dma else 1

    @property
    def n_sub(self) -> int:
        """Ports per RF chain in a partially-connected network."""
        return self.n_t // self.n_rf

    @property
    def n_streams(self) -> int:
        return min(self.n_s, self.n_rf)


def radiating_elements(spec: ArchitectureSpec) -> int:
    """Radiator count per architecture."""
    k = spec.kind
    if k is Architecture.DO:
        return spec.n_uc
    if k is Architecture.DH:
        return spec.n_t * spec.n_uc
    if k is Architecture.TH:
        return spec.n_t * spec.m_dma * spec.n_uc
    return spec.n_t


def equal_aperture_spec(
    kind: Architecture | str,
    n_rad: int,
    n_feeds: int = 2,
    m_dma: int = 2,
    n_rf_hybrid: int = 4,
    n_s: int = 2,
) -> ArchitectureSpec:
    """Dimension an architecture so it has exactly ``n_rad`` radiators.

    Plain arrays get ``n_rad`` antennas. TH uses ``n_feeds`` feeds each
    exciting ``m_dma`` DMAs; DH keeps ``n_feeds`` feeds but one (longer) DMA
    per feed; DO is a single DMA spanning the whole aperture.
    """
    kind = Architecture(kind)
    if kind is Architecture.DO:
        return ArchitectureSpec(kind, n_t=1, n_rf=1, n_uc=n_rad, m_dma=1, n_s=n_s)
    if kind is Architecture.DH:
        if n_rad % n_feeds:
            raise ValueError(f"n_rad={n_rad} not divisible by {n_feeds} feeds")
        return ArchitectureSpec(kind, n_t=n_feeds, n_rf=n_feeds, n_uc=n_rad // n_feeds, m_dma=1, n_s=n_s)
    if kind is Architecture.TH:
        if n_rad % (n_feeds * m_dma):
            raise ValueError(f"n_rad={n_rad} not divisible by n_feeds*m_dma={n_feeds * m_dma}")
        return ArchitectureSpec(kind, n_t=n_feeds, n_rf=n_feeds, n_uc=n_rad // (n_feeds * m_dma),
                                m_dma=m_dma, n_s=n_s)
    if kind is Architecture.A:
        return ArchitectureSpec(kind, n_t=n_rad, n_rf=1, n_s=n_s)
    if kind is Architecture.FD:
        return ArchitectureSpec(kind, n_t=n_rad, n_rf=n_rad, n_s=n_s)
    return ArchitectureSpec(kind, n_t=n_rad, n_rf=min(n_rf_hybrid, n_rad), n_s=n_s)
