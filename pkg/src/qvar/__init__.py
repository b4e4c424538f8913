"""Quadratic variations of Gaussian sequences.

Builds exact covariance matrices of scheme-differenced Gaussian processes,
evaluates convergence and central-limit conditions on them, and verifies the
predictions by reproducible Monte Carlo.
"""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigError,
    DataError,
    DegenerateError,
    DomainError,
    NotPSDError,
    NumericalError,
    QvarError,
    UsageError,
)
from .kernels import KernelSpec, bifbm, brownian, covariance, fbm, incremental_variance, sub_fbm
from .partitions import Partition, make_perturbed, make_uniform, ratio
from .schemes import (
    CovMatrix,
    CustomPhi,
    FirstOrder,
    GeneralA,
    One,
    PowerGamma,
    SecondOrderBegyn,
    build_cross_gamma,
    build_gamma,
    weight_rows,
)
from .spectral import eigenvalues, isserlis_oracle, norms, qv_moments
from .limits import as_classify, berry_esseen, clt_ratios, condition_report, energy_trace, planar_variation
from .montecarlo import McConfig, empirical_stats, factorize, sample_v_replicates
from .estimators import PathSample, alpha_limit_constant, hurst_estimate, realized_stat
