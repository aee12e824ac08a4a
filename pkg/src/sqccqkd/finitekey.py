"""Composable finite-size key length: penalty terms, worst-case estimators, K^F.

The finite-block rate subtracts entropy-smoothing, discretization and
hashing penalties from the asymptotic rate evaluated at worst-case
covariance estimates, so the quoted key length fails with probability at
most the summed epsilon budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelParams, ProtocolParams, shared_state
from .errors import DomainError
from .gaussian import TwoModeGaussian
from .keyrate import Optimum, holevo_bound, maximise_scalar, mutual_information
from .postprocess import (
    RenormStrategy,
    postprocess_stats,
    renormalise,
    required_displacement,
)
from .special import Tolerance, beta_inv_cdf_symmetric

__all__ = [
    "SecurityParams",
    "DeltaTerms",
    "FiniteKeyResult",
    "delta_terms",
    "worst_case_estimators",
    "finite_rate",
    "optimise_v_finite",
]


@dataclass(frozen=True)
class SecurityParams:
    """Block size, reconciliation statistics, and the epsilon budget.

    ``eps_qrng``, ``eps_ir`` and ``eps_cal`` enter only the summed budget,
    not the rate formula; they are carried implicitly by the other terms.
    """

    block_size: float
    frame_success: float = 0.9964
    discretization_bits: int = 6
    eps_pe: float = 1e-10
    eps_s: float = 1e-10
    eps_h: float = 1e-10
    eps_ent: float = 1e-10
    eps_qrng: float = 1e-10
    eps_ir: float = 1e-10
    eps_cal: float = 1e-10

    def __post_init__(self):
        if not (self.block_size >= 2):
            raise DomainError(f"block_size must be >= 2, got {self.block_size}")
        if not (0.0 < self.frame_success <= 1.0):
            raise DomainError(
                f"frame_success must be in (0, 1], got {self.frame_success}"
            )
        if self.discretization_bits < 1:
            raise DomainError(
                f"discretization_bits must be >= 1, got {self.discretization_bits}"
            )
        for name in ("eps_pe", "eps_s", "eps_h", "eps_ent"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise DomainError(f"{name} must be in (0, 1), got {value}")
        for name in ("eps_qrng", "eps_ir", "eps_cal"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be >= 0")

    def epsilon_total(self) -> float:
        """Seven-term composable failure budget."""
        return (self.eps_qrng + self.eps_h + self.eps_s + self.eps_ir
                + self.eps_ent + self.eps_pe + self.eps_cal)


@dataclass(frozen=True)
class DeltaTerms:
    """Finite-size penalty terms (bits, before block-size scaling)."""

    aep: float
    ent: float
    s: float
    h: float


@dataclass(frozen=True)
class FiniteKeyResult:
    """Finite-block key length and everything that went into it."""

    delta_aep: float
    delta_ent: float
    delta_s: float
    delta_h: float
    sigma_a_max: float
    sigma_b_max: float
    sigma_c_min: float
    k_pe_inf: float
    key_length: float
    rate: float
    epsilon_total: float
    feasible: bool
    block_size: float


def delta_terms(sec: SecurityParams) -> DeltaTerms:
    """Penalties for min-entropy smoothing, entropy estimation, frame errors, hashing."""
    p_f = sec.frame_success
    inner = 2.0 / (p_f * sec.eps_s ** 2 / 3.0) ** 2
    if inner <= 1.0:
        raise DomainError("smoothing penalty logarithm out of range")
    aep = 4.0 * (sec.discretization_bits + 1) * math.sqrt(math.log2(inner))
    ent = math.sqrt(2.0 * math.log2(2.0 / sec.eps_ent))
    s_arg = p_f - p_f * sec.eps_s ** 2 / 3.0
    if s_arg <= 0.0:
        raise DomainError("frame-error penalty logarithm out of range")
    s = math.log2(s_arg)
    h = 2.0 * math.log2(math.sqrt(2.0) * sec.eps_h)
    return DeltaTerms(aep=aep, ent=ent, s=s, h=h)


def _confidence_shrink(z: float, n: float) -> float:
    """1 - A(z) with A(z) twice the Beta(n/2, n/2) quantile at z."""
    return 1.0 - 2.0 * beta_inv_cdf_symmetric(z, n / 2.0, Tolerance(max_iter=400))


def worst_case_estimators(a_hat: float, b_hat: float, c_hat: float,
                          sec: SecurityParams) -> tuple[float, float, float]:
    """Confidence-interval extremes of the covariance triple.

    Variances are inflated and the correlation deflated, which is the
    direction that enlarges the eavesdropper bound.  The true values lie
    outside these extremes with probability at most eps_pe.
    """
    if c_hat == 0.0:
        raise DomainError("worst-case correlation estimate undefined for c = 0")
    n = sec.block_size
    shrink_var = _confidence_shrink(sec.eps_pe / 12.0, n)
    shrink_cov = _confidence_shrink(sec.eps_pe ** 2 / 1296.0, n)
    delta_var = (1.0 + shrink_var) * (1.0 + 240.0 / sec.eps_pe * math.exp(-n / 32.0)) - 1.0
    delta_cov = 0.5 * shrink_var + shrink_cov
    sigma_a = (1.0 + delta_var) * a_hat
    sigma_b = (1.0 + delta_var) * b_hat
    sigma_c = (1.0 - 2.0 * math.sqrt(a_hat * b_hat / c_hat ** 2) * delta_cov) * c_hat
    return sigma_a, sigma_b, sigma_c


def finite_rate(proto: ProtocolParams, chan: ChannelParams,
                strategy: RenormStrategy = RenormStrategy.B_PRESERVING,
                sec: SecurityParams = SecurityParams(block_size=1e8),
                mi_double: bool = False) -> FiniteKeyResult:
    """Finite-block secret-key rate K^F = l / N.

    Mutual information is taken at the mean covariance estimates (the
    analytic renormalised moments); the eavesdropper bound at the
    worst-case estimates.
    """
    base = shared_state(proto, chan, symbol_index=1)
    stats = postprocess_stats(proto, chan)
    renorm = renormalise(stats, base, strategy)
    sp = renorm.state_prime

    mi = mutual_information(sp, double=mi_double)
    sig_a, sig_b, sig_c = worst_case_estimators(sp.a, sp.b, sp.c, sec)
    worst = TwoModeGaussian(mean=sp.mean, a=sig_a, b=sig_b, c=sig_c)
    chi_worst = holevo_bound(worst)
    k_pe = proto.reconciliation_efficiency * mi - chi_worst

    d = delta_terms(sec)
    n = sec.block_size
    p_f = sec.frame_success
    rate = (p_f * k_pe
            - math.sqrt(p_f / n) * d.aep
            - math.sqrt(p_f * math.log2(p_f * n) / n) * d.ent
            + d.s / n
            + d.h / n)
    return FiniteKeyResult(
        delta_aep=d.aep,
        delta_ent=d.ent,
        delta_s=d.s,
        delta_h=d.h,
        sigma_a_max=sig_a,
        sigma_b_max=sig_b,
        sigma_c_min=sig_c,
        k_pe_inf=k_pe,
        key_length=rate * n,
        rate=rate,
        epsilon_total=sec.epsilon_total(),
        feasible=renorm.physical.passed,
        block_size=n,
    )


def optimise_v_finite(chan: ChannelParams, qos_threshold: float,
                      sec: SecurityParams,
                      strategy: RenormStrategy = RenormStrategy.B_PRESERVING,
                      beta: float = 0.95,
                      v_low: float = 1.001, v_high: float = 1e3,
                      coarse_points: int = 60, rel_tol: float = 1e-4,
                      mi_double: bool = False) -> Optimum:
    """Maximise the finite-block rate over the modulation variance."""

    def objective(v: float) -> float:
        d = required_displacement(v, chan, qos_threshold)
        proto = ProtocolParams(v, d, beta)
        res = finite_rate(proto, chan, strategy, sec, mi_double)
        return res.rate if res.feasible else -math.inf

    return maximise_scalar(objective, v_low, v_high, coarse_points, rel_tol)
