"""Inverse pipeline: calibration fits, separation determination,
correction estimators, fundamental limits, and the uncertainty budget."""
from .calibration import (
    CalibrationResult,
    FitResult,
    fit_s2omega,
    fit_parabolas,
    fit_cpp,
    fit_s4omega,
    separate_k_gamma,
    calibrate_campaign,
)
from .corrections import (
    drift_correct,
    bending_correct,
    hydro_leakage_correct,
    estimate_interference,
    stochastic_noise,
)
from .limits import LimitReport, limits, fm_shift
from .budget import UncertaintyBudget, build_budget, recover_gradient

__all__ = [
    "CalibrationResult", "FitResult", "fit_s2omega", "fit_parabolas",
    "fit_cpp", "fit_s4omega", "separate_k_gamma", "calibrate_campaign",
    "drift_correct", "bending_correct", "hydro_leakage_correct",
    "estimate_interference", "stochastic_noise",
    "LimitReport", "limits", "fm_shift",
    "UncertaintyBudget", "build_budget", "recover_gradient",
]
