"""scikit-learn style wrappers around the filter, decay and rate machinery."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .decay import RateFit, chi_dd, decay_rate, filter_period, rate_from_curve, DecayCurve
from .filterfn import filter_fid, filter_repeated
from .sequence import PulseSequence, toggle_filter
from .spectrum import model_from_dict


def _column(X, name="X"):
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"{name} must have a single column, got {X.shape[1]}")
        X = X[:, 0]
    return X


class DecayRateRegressor(RegressorMixin, BaseEstimator):
    """Straight-line fit chi(t) = rate * t + intercept over a time window.

    ``window=None`` uses all samples.
    """

    def __init__(self, window=None):
        self.window = window

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_2d=False, y_numeric=True)
        t = _column(X)
        fit: RateFit = rate_from_curve(DecayCurve(t, np.asarray(y, float)), self.window)
        self.rate_ = fit.rate
        self.intercept_ = fit.intercept
        self.max_residual_ = fit.max_residual
        self.fit_window_ = fit.fit_window
        return self

    def predict(self, X):
        check_is_fitted(self, "rate_")
        return self.rate_ * _column(X) + self.intercept_


class FilterFunctionTransformer(TransformerMixin, BaseEstimator):
    """Map angular frequencies to |F(omega)|^2 of a repeated pulse sequence.

    ``n_cycles`` counts filter periods; ``family="FID"`` gives the box filter
    of length ``n_cycles * cycle_time``.
    """

    def __init__(self, family="CPMG", order=2, cycle_time=1.0, n_cycles=1, x=0.0):
        self.family = family
        self.order = order
        self.cycle_time = cycle_time
        self.n_cycles = n_cycles
        self.x = x

    def fit(self, X=None, y=None):
        self.sequence_ = PulseSequence.from_dict(
            {"family": self.family, "order": self.order, "cycle_time": self.cycle_time, "x": self.x})
        return self

    def transform(self, X):
        check_is_fitted(self, "sequence_")
        omega = _column(X, "omega")
        if self.sequence_.order == 0:
            values = filter_fid(omega, self.n_cycles * self.sequence_.cycle_time)
        else:
            values = filter_repeated(toggle_filter(self.sequence_), self.n_cycles, omega)
        return (np.abs(values) ** 2)[:, None]


class DephasingSimulator(BaseEstimator):
    """Survival probability of a pulse sequence in a Gaussian-process bath.

    ``fit`` builds the noise model and sequence and records the long-time
    rate; ``predict`` returns exp(-chi) at whole multiples of the filter
    period.
    """

    def __init__(self, kind="GAUSSIAN", tau_b=110.0, b_se=0.005, family="CPMG", order=2,
                 cycle_time=220.8, x=0.0):
        self.kind = kind
        self.tau_b = tau_b
        self.b_se = b_se
        self.family = family
        self.order = order
        self.cycle_time = cycle_time
        self.x = x

    def fit(self, X=None, y=None):
        self.model_ = model_from_dict({"kind": self.kind, "tau_B": self.tau_b, "b_SE": self.b_se})
        self.sequence_ = PulseSequence.from_dict(
            {"family": self.family, "order": self.order, "cycle_time": self.cycle_time, "x": self.x})
        self.period_ = self.cycle_time if self.sequence_.order == 0 else filter_period(self.sequence_)
        self.rate_ = decay_rate(self.sequence_, self.model_).rate
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        t = _column(X, "times")
        m = t / self.period_
        if np.any(np.abs(m - np.rint(m)) > 1e-9 * np.maximum(1.0, m)) or np.any(np.rint(m) < 1):
            raise ValueError(f"times must be positive multiples of the filter period {self.period_:g}")
        return np.array([np.exp(-chi_dd(self.sequence_, int(k), self.model_)) for k in np.rint(m)])
