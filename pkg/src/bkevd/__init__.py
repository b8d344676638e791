"""Low-rank eigendecompositions of bistochastic kernel matrices.

The package factors an implicit positive semidefinite kernel matrix with a
randomly pivoted partial Cholesky algorithm and computes the approximate
eigenvalue decomposition of its bistochastic normalization by two routes
(dilution and subsampling with Nystrom extension).  A pseudospectral ETDRK4
Kuramoto-Sivashinsky solver and an experiment pipeline reproduce a full
spatiotemporal pattern-extraction study.
"""

from .bistochastic import (
    BistochasticEVD,
    BistochasticNormalizers,
    dense_bistochastic,
    diluted_normalized_evd,
    dilution_evd,
    normalizers_from_factor,
    subsample_evd,
)
from .errors import (
    BkevdError,
    ConfigurationError,
    DegenerateDataError,
    InstabilityError,
    IterationLimitError,
    NormalizationError,
    NumericalError,
    RankError,
)
from .kernel import (
    CountingOracle,
    DelayEmbeddedProductStates,
    DenseMatrixOracle,
    GaussianKernelConfig,
    GaussianKernelOracle,
    KernelOracle,
    default_epsilon_grid,
    delay_embed,
    gaussian_cross,
    gaussian_entry,
    gaussian_gram,
    median_bandwidth,
    scaling_refine_bandwidth,
)
from .ks import (
    ETDRK4Coefficients,
    KSConfig,
    SpatiotemporalDataset,
    contour_phi1,
    dealias_three_halves,
    etdrk4_coefficients,
    etdrk4_integrate,
    ks_linear_symbol,
    wavenumbers,
)
from .linalg import QRResult, SVDResult, SymmetricEVDResult, qr_cgs2, svd_small, sym_evd
from .pipeline import (
    CalibrationSettings,
    ExperimentConfig,
    ExperimentResult,
    ProjectionReport,
    calibrate_bandwidth,
    dense_reference_evd,
    eigenvalue_report,
    project_states,
    run_experiment,
)
from .rpcholesky import PartialCholeskyFactor, column_nystrom, rpcholesky, trace_error

__version__ = "0.1.0"
