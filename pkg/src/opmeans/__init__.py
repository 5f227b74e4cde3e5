"""Operator means of symmetric positive definite matrices.

Two-variable Kubo-Ando means, multivariable means (ALM, BMP, power,
Karcher, log-Euclidean), means integrated over the probability simplex, and
numerical checks of the inequalities relating them.
"""
from .kubo_ando import (
    ReprFunction,
    arithmetic,
    binary_mean,
    geometric,
    harmonic,
    logarithmic,
    logarithmic_mean_2,
    parse_repr,
    power,
    repr_derivative_at_one,
    weighted_geometric,
)
from .log_mean import (
    MeanFamily,
    SimplexRule,
    m_logarithmic_mean,
    mean_family,
    shift_compound,
    simplex_rule,
    verify_logmean_inequalities,
)
from .matrix_io import MatrixFileError, read_tuple, write_tuple
from .multi_means import (
    ConvergenceError,
    MeanKind,
    SolverConfig,
    alm_mean,
    arithmetic_mean,
    bmp_mean,
    check_property,
    evaluate,
    harmonic_mean,
    karcher_mean,
    log_euclidean_mean,
    power_mean,
)
from .report import VerdictReport
from .spd_core import (
    DomainError,
    NotPositiveDefiniteError,
    expm,
    logm,
    loewner_leq,
    powm,
    random_spd,
    sqrtm,
    sym_eig,
    thompson_distance,
)

__version__ = "0.1.0"
