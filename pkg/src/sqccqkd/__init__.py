"""Secret-key rates and Monte Carlo validation for simultaneous quantum-classical CV-QKD.

Classical QPSK symbols ride on the same optical mode as a Gaussian-modulated
quantum signal; this package computes the coupling those symbols induce on
the quantum covariance, the renormalisation that keeps the effective channel
physical, and the resulting asymptotic and composable finite-size key rates,
with a seeded Monte Carlo engine validating the closed-form model.
"""

from .channel import (
    ChannelParams,
    PHASE_NOISE_PRESET,
    ProtocolParams,
    attenuation_db_to_transmissivity,
    mean_photon_number,
    qi_baseline_state,
    shared_state,
)
from .errors import (
    ConvergenceError,
    DomainError,
    NumericError,
    PhysicalityError,
    SqccError,
)
from .finitekey import (
    DeltaTerms,
    FiniteKeyResult,
    SecurityParams,
    delta_terms,
    finite_rate,
    optimise_v_finite,
    worst_case_estimators,
)
from .gaussian import (
    MeasurementDistribution,
    PhysicalityVerdict,
    SymplecticSpectrum,
    TwoModeGaussian,
    conditional_eigenvalue,
    g_function,
    is_physical,
    measurement_distribution,
    symplectic_spectrum,
)
from .keyrate import (
    KeyRateResult,
    Optimum,
    asymptotic_rate,
    baseline_rate,
    holevo_bound,
    mutual_information,
    optimise_v,
)
from .montecarlo import (
    EmpiricalMoments,
    EstimationResult,
    RNG_ALGORITHM,
    ShotBatch,
    classical_bit_error_rate,
    discriminate_and_redisplace,
    empirical_moments,
    estimation_pipeline,
    sample_joint,
    symbol_error_rate,
)
from .postprocess import (
    CheckResult,
    PostprocessStats,
    RenormResult,
    RenormStrategy,
    error_rate_from_snr,
    physicality_check,
    postprocess_stats,
    renormalise,
    required_displacement,
    shrinkage_from_snr,
    variance_shift_factor,
)
from .special import (
    DEFAULT_TOLERANCE,
    Tolerance,
    beta_inv_cdf_symmetric,
    beta_quantile,
    beta_reg,
    erf,
    erfc,
    erfc_inv,
    normal_cdf,
    normal_quantile,
)

__version__ = "0.1.0"
