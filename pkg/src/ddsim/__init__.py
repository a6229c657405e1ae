"""Filter-function simulation of dynamical decoupling under Gaussian-process noise."""
from .decay import DecayCurve, RateFit, chi_dd, chi_fid, decay_curve, decay_rate, rate_harmonic
from .exceptions import ConfigError, InvalidArgumentError, NumericalError
from .filterfn import filter_repeated, filter_single, fourier_coefficients
from .sequence import (PulseSequence, ToggleFilter, cpmg_times, custom_sequence, free_evolution,
                       three_pulse_family, toggle_filter, udd_times)
from .spectrum import NoiseModel, gaussian_model, lorentzian_model, tabulated_model
from .stochastic import mc_survival

__all__ = [
    "ConfigError", "DecayCurve", "InvalidArgumentError", "NoiseModel", "NumericalError",
    "PulseSequence", "RateFit", "ToggleFilter", "chi_dd", "chi_fid", "cpmg_times",
    "custom_sequence", "decay_curve", "decay_rate", "filter_repeated", "filter_single",
    "fourier_coefficients", "free_evolution", "gaussian_model", "lorentzian_model",
    "mc_survival", "rate_harmonic", "tabulated_model", "three_pulse_family", "toggle_filter",
    "udd_times",
]
