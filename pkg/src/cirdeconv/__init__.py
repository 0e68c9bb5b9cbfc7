"""Deconvolution contrast estimation for hidden CIR volatility chains."""

from .baselines import FilterConfig, FilterResult, apf, ekf_augmented, ksapf
from .contrast import (ContrastConfig, EstimateResult, OptimizerSettings,
                       default_cutoff, empirical_contrast, minimize_contrast,
                       u_star)
from .inference import (ConfidenceIntervals, CovarianceResult,
                        confidence_intervals, grad_l, hessian_V,
                        long_run_omega, sandwich, score_series)
from .model import (DEFAULT_DELTA, GammaStationary, ModelConfig, NoiseSpec,
                    ThetaCIR, Trajectory, drift_diffusion, sample_noise,
                    simulate, stationary_params)
from .special import (AlphaCoeffs, BetaCoeffs, cf_gamma, cf_l, cf_log_chisq,
                      complex_gamma, l2_norm_sq, l_of_x)

__version__ = "0.1.0"
