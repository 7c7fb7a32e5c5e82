"""Metrics for the complexified Bose-Hubbard model.

Builds the non-Hermitian su(2) Bose-Hubbard matrices, solves the Dieudonne
equation H^H Theta = Theta H for every admissible Hilbert-space metric, maps
the positivity domains of the named metric families and audits unitarity of
the time evolution in the metric-weighted inner product.
"""

from .analysis import (
    eigencurve_table,
    find_gamma_critical,
    fit_series,
    positivity,
    power_pattern,
)
from .dieudonne import (
    MetricCandidate,
    MetricParams,
    dieudonne_residual,
    metric_from_first_row,
    solve_nullspace,
    spectral_metric,
)
from .errors import (
    AmbiguousRank,
    BranchCrossing,
    CBHError,
    DegenerateSpectrum,
    IllConditioned,
    InvalidDimension,
    InvalidParams,
    NoConvergence,
    NonHermitianInput,
    NonPositiveMetric,
    NoSignChange,
    NumericalError,
    OutOfValidityRange,
    RecurrenceBreakdown,
    UnknownFamily,
    Unsupported,
)
from .evolution import check_observable, evolve
from .families import named_family
from .hamiltonian import CbhParams, build_cbh, build_hermitian_bh, cbh, classify_phase, spectrum
from .numerics import general_eigen, hermitian_eigen, matrix_exponential_apply, nullspace
from .su2 import build_generators

__version__ = "0.1.0"
