"""Idempotent (max-plus) probability measures on finite metric spaces."""

from .maxplus import NEG_INF, FiniteMetricSpace, diameter, odot, oplus, scalar, thresholds, validate_metric
from .measures import IdempotentMeasure, dirac, evaluate, make_measure, pushforward, support
from .transport import (
    Coupling,
    DistanceCertificate,
    canonical_coupling,
    chebyshev,
    dirac_distance,
    distance,
    eval_formula1,
    feasible,
    marginals,
    oracle_distance,
    product_coupling,
)
from .tower import (
    LimitPoint,
    TowerElement,
    TowerMetric,
    d_plus,
    dirac_set_distance,
    eta,
    eta_nm,
    level_distance,
    p7_check,
    psi,
    psi_mn,
    q_embed,
    theta,
)

__all__ = [name for name in dir() if not name.startswith("_")]
