"""Constant-amplitude gridless frequency estimation.

Multichannel sinusoids whose amplitudes are equal across channels are
recovered by a convex structured low-rank program over Hankel-Toeplitz
blocks, solved with ADMM; frequencies come from a root-MUSIC Vandermonde
decomposition of the recovered Toeplitz matrix.
"""

from .admm import AdmmOptions, AdmmTrace
from .baselines import AnmResult, InterFormResult, anm_solve, anm_tau, interform_solve
from .dual import (
    CertificateReport,
    TauParams,
    certificate_check,
    dual_atomic_norm,
    dual_poly,
    tau_bound,
    tau_explicit,
    tau_for,
)
from .retrieval import (
    ConditioningError,
    DegenerateSpectrumError,
    FrequencyEstimate,
    UnidentifiableError,
    estimate_rank,
    identifiability_sweep,
    recover_gains,
    vandermonde_decompose,
)
from .signals import (
    NoiseSpec,
    Observation,
    SpectralModel,
    matched_rmse,
    observe,
    random_model,
    snr_to_sigma,
    steering,
    steering_matrix,
    success,
    synthesize,
    uniform_frequencies,
)
from .solver import SolveResult, default_n, slra_value, solve_denoising, solve_noiseless
from .structured import (
    DimensionError,
    InvariantError,
    NumericalError,
    hankel_adjoint,
    hankel_lift,
    psd_project,
    toeplitz_adjoint,
    toeplitz_lift,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
