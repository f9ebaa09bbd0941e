"""Monotone quantum Fisher information metrics for finite-dimensional states."""

from .errors import QFisherError
from .matrix_core import DensityMatrix, PositiveMatrix, validate_density, validate_positive
from .monotone import (
    BKM,
    GEOMETRIC,
    HARMONIC,
    SLD,
    WY,
    StandardFunction,
    catalog,
    check_standard,
    chi2,
    mean,
    parse_function_spec,
    tilde_transform,
    wyd,
)
from .superop import jd_apply, jd_inverse_apply, mean_kernel
from .metrics import (
    ExtendedMetricSpec,
    ParamFamily,
    chi2_divergence,
    covariance,
    cramer_rao_certificate,
    extended_metric,
    fisher_metric,
    qfim,
    score_operators,
    skew_information,
    unbiased_estimators,
    variance,
    wyd_skew,
)
from .channels import KrausChannel, metric_monotonicity_gap, qfim_monotonicity_gap
from .measurement import Povm, classical_fisher, optimal_measurement, sld_optimal_observable, supremum_certificate

__version__ = "0.1.0"
