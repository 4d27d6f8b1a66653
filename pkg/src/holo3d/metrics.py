"""Relative reconstruction error metrics in the object and data domains."""

import numpy as np

from .core import frobenius_norm
from .errors import DimensionMismatchError, UndefinedMetricError
from .propagation import _forward_arr


def object_domain_error(truth, estimate):
    """||truth - estimate||_F / ||truth||_F."""
    if truth.grid != estimate.grid or truth.zplanes != estimate.zplanes:
        raise DimensionMismatchError("truth and estimate have different geometry")
    denom = frobenius_norm(truth)
    if denom == 0:
        raise UndefinedMetricError("ground truth has zero norm")
    return float(np.linalg.norm(truth.values - estimate.values)) / denom


def data_domain_error(data, estimate, plan):
    """||V - A(estimate)||_F / ||V||_F."""
    s = plan.setup
    if data.grid != s.grid:
        raise DimensionMismatchError("data field does not match the plan geometry")
    if estimate.grid != s.grid or estimate.zplanes != s.zplanes:
        raise DimensionMismatchError("estimate does not match the plan geometry")
    denom = frobenius_norm(data)
    if denom == 0:
        raise UndefinedMetricError("data field has zero norm")
    resid = data.values - _forward_arr(estimate.values, plan)
    return float(np.linalg.norm(resid)) / denom
