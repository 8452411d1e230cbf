"""Hyperuniform point processes from fBm-perturbed lattices.

Simulation (exact O(n log n) fractional-noise sampling), number-variance
scaling experiments, structure-factor evaluation and estimation, and
mixing diagnostics, all reproducible through counter-based random streams.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateEnsemble,
    FactorizationFailure,
    GridMismatch,
    HyperlatError,
    InsufficientData,
    NegativeEigenvalueError,
    NonpositiveVariance,
    NumericError,
    QuadratureFailure,
    TruncationTooLarge,
    UsageError,
    WindowTooSmall,
)
from .streams import StreamKey
from .fgn import (
    FbmPath,
    FgnCovariance,
    HurstIndex,
    circulant_eigenvalues,
    fgn_autocovariance,
    fgn_covariance_table,
    sample_fbm_lattice,
    sample_fbm_lattice_batch,
    sample_fbm_points,
    sample_fgn,
    sample_fgn_pair,
)
from .pointproc import (
    CampbellResult,
    PointConfiguration,
    campbell_check,
    depalmize,
    lattice_configuration,
    perturb_palm_lattice,
    perturb_point_set,
    poisson_configuration,
)
from .stats import (
    RadialVarianceTable,
    RegressionFit,
    SweepPoint,
    count_in_ball,
    default_radii,
    exponent_sweep,
    loglog_regress,
    number_variance_scan,
)
from .spectrum import (
    ApproximationGap,
    StructureFactorCurve,
    approximation_gap,
    asymptotic_constant,
    asymptotic_structure_factor,
    brownian_structure_factor,
    continuum_structure_factor,
    dual_grid,
    empirical_structure_factor,
    structure_factor_curve,
    structure_factor_sum,
)
from .ergodicity import (
    MixingCurve,
    levy_scaling_check,
    levy_spectral_integral,
    mc_mixing_covariance,
    mixing_covariance,
    mixing_decay_check,
    variogram,
)
