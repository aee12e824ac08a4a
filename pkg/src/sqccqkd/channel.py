"""Lossy thermal channel acting on the entangled source, and the prior-model comparator.

The source is a two-mode squeezed vacuum of variance V; one mode passes a
bosonic channel with transmissivity T and excess noise eps (shot-noise
units, referred to the channel input), optionally with power-dependent
phase noise.  Classical QPSK symbols ride on the same mode as large
displacements d * exp(i*pi*(2k-1)/4), k = 1..4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gaussian import TwoModeGaussian

__all__ = [
    "ChannelParams",
    "ProtocolParams",
    "PHASE_NOISE_PRESET",
    "qpsk_symbol",
    "shared_state",
    "qi_baseline_state",
    "mean_photon_number",
    "attenuation_db_to_transmissivity",
]

# named preset for the power-proportional phase-noise factor
PHASE_NOISE_PRESET = 1e-4


@dataclass(frozen=True)
class ChannelParams:
    """Bosonic channel: transmissivity, excess noise, optional phase-noise factor."""

    transmissivity: float
    excess_noise: float = 0.0
    phase_noise_factor: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.transmissivity <= 1.0):
            raise DomainError(
                f"transmissivity must be in (0, 1], got {self.transmissivity}"
            )
        if not (self.excess_noise >= 0.0 and math.isfinite(self.excess_noise)):
            raise DomainError(f"excess_noise must be >= 0, got {self.excess_noise}")
        if not (self.phase_noise_factor >= 0.0
                and math.isfinite(self.phase_noise_factor)):
            raise DomainError(
                f"phase_noise_factor must be >= 0, got {self.phase_noise_factor}"
            )

    def total_excess_noise(self, displacement: float) -> float:
        """Channel excess noise plus the power-proportional phase-noise term."""
        t = self.transmissivity
        return self.excess_noise + self.phase_noise_factor * t * displacement ** 2


@dataclass(frozen=True)
class ProtocolParams:
    """Source and reconciliation parameters chosen by the sender."""

    modulation_variance: float
    displacement: float = 0.0
    reconciliation_efficiency: float = 0.95

    def __post_init__(self):
        if not (self.modulation_variance >= 1.0
                and math.isfinite(self.modulation_variance)):
            raise DomainError(
                f"modulation_variance must be >= 1, got {self.modulation_variance}"
            )
        if not (self.displacement >= 0.0 and math.isfinite(self.displacement)):
            raise DomainError(f"displacement must be >= 0, got {self.displacement}")
        if not (0.0 < self.reconciliation_efficiency <= 1.0):
            raise DomainError(
                "reconciliation_efficiency must be in (0, 1], "
                f"got {self.reconciliation_efficiency}"
            )


def qpsk_symbol(displacement: float, symbol_index: int) -> complex:
    """Classical alphabet point d * exp(i*pi*(2k - 1)/4) for k in 1..4."""
    if symbol_index not in (1, 2, 3, 4):
        raise DomainError(f"symbol_index must be in 1..4, got {symbol_index}")
    phase = math.pi * (2 * symbol_index - 1) / 4.0
    return displacement * complex(math.cos(phase), math.sin(phase))


def shared_state(proto: ProtocolParams, chan: ChannelParams,
                 symbol_index: int = 1) -> TwoModeGaussian:
    """State shared by the two parties after the channel, for one classical symbol.

    Covariance: a = V, b = T*(V + eps_tot - 1) + 1, c = sqrt(T*(V^2 - 1)).
    Mean: receiver mode displaced by sqrt(T) times the alphabet point,
    i.e. (+-sqrt(T)*d/sqrt(2)) per quadrature.
    """
    v = proto.modulation_variance
    t = chan.transmissivity
    d = proto.displacement
    eps_tot = chan.total_excess_noise(d)
    sym = qpsk_symbol(d, symbol_index)
    sqrt_t = math.sqrt(t)
    return TwoModeGaussian(
        mean=np.array([0.0, 0.0, sqrt_t * sym.real, sqrt_t * sym.imag]),
        a=v,
        b=t * (v + eps_tot - 1.0) + 1.0,
        c=math.sqrt(t * (v * v - 1.0)),
    )


def qi_baseline_state(proto: ProtocolParams, chan: ChannelParams,
                      e_c: float) -> TwoModeGaussian:
    """Prior-literature coupling model: bit errors as Gaussian excess noise.

    The classical-quantum coupling is folded into the channel as an extra
    input-referred noise 4*d^2*e_c on top of the physical excess noise; the
    state is treated as zero-mean and no renormalisation is applied.
    """
    if not (0.0 <= e_c <= 0.5):
        raise DomainError(f"e_c must be in [0, 0.5], got {e_c}")
    v = proto.modulation_variance
    t = chan.transmissivity
    d = proto.displacement
    eps_prime = chan.total_excess_noise(d) + 4.0 * d * d * e_c
    return TwoModeGaussian(
        mean=np.zeros(4),
        a=v,
        b=t * (v + eps_prime - 1.0) + 1.0,
        c=math.sqrt(t * (v * v - 1.0)),
    )


def mean_photon_number(chan: ChannelParams) -> float:
    """Mean photon number of the thermal input realising the channel noise."""
    t = chan.transmissivity
    eps = chan.excess_noise
    if t == 1.0:
        if eps > 0.0:
            raise DomainError(
                "a lossless channel admits no thermal input for excess_noise > 0"
            )
        return 0.0
    return t * eps / (2.0 * (1.0 - t))


def attenuation_db_to_transmissivity(db: float) -> float:
    """Convert channel attenuation in dB to transmissivity."""
    if not (db >= 0.0 and math.isfinite(db)):
        raise DomainError(f"attenuation must be >= 0 dB, got {db}")
    return 10.0 ** (-db / 10.0)
