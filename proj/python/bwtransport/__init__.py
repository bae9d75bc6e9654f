"""Bures-Wasserstein transport for possibly singular Gaussian covariances."""

from ._bwt import (
    DEFAULT_TOL_MAP,
    DEFAULT_TOL_REL,
    Error,
    InvalidInput,
    InvalidParam,
    NoSpdMap,
    NotInvertible,
    NumericalInconsistency,
    PreconditionFailed,
    Unreachable,
    barycenter,
    canonical_spd_map,
    cross_gram,
    geodesic,
    ibm_w2_analytic,
    ibm_w2_numeric,
    is_reachable,
    ot_map,
    rank,
    schur_complement,
    spd_reachability,
    w2_distance,
    w2_squared,
)

__all__ = [name for name in dir() if not name.startswith("_")]
