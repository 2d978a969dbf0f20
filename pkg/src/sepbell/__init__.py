"""Separability Bell inequalities for N-qudit correlations.

Builds the pairing operators sigma_I and their tensor products Sigma_I,
evaluates separability and local-hidden-variable bounds on arbitrary states,
and cross-checks every quantitative statement with independent oracles.
"""

from .errors import (
    CoefficientError,
    DimensionMismatchError,
    EnsembleError,
    InvalidDimensionError,
    InvalidPhaseError,
    NotHermitianError,
    ParameterError,
    SepBellError,
    SizeLimitError,
    StrategyError,
)
from .operators import (
    GlobalOperator,
    conjugate_local,
    global_sigma,
    global_sigma_minus,
    global_sigma_plus,
    local_sigma,
    local_sigma_minus,
    local_sigma_plus,
    setting_decomposition,
)
from .oracles import (
    maximize_over_products,
    ppt_min_eigenvalue,
    ppt_threshold,
    sample_correlation,
    spectral_extremes,
)
from .pairings import PairingIndexSet, canonical_pairing, count_pairings, enumerate_pairings
from .states import (
    DensityMatrix,
    PureState,
    SeparableEnsemble,
    ensemble_to_density,
    maximally_entangled,
    plus_minus_states,
    psi_mu,
    random_product_state,
    werner_state,
)
from .witnesses import (
    CorrelationReport,
    check_lhv,
    check_separability,
    correlation,
    scan_index_sets,
    werner_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "canonical_pairing",
    "check_lhv",
    "check_separability",
    "CoefficientError",
    "conjugate_local",
    "correlation",
    "CorrelationReport",
    "count_pairings",
    "DensityMatrix",
    "DimensionMismatchError",
    "ensemble_to_density",
    "EnsembleError",
    "enumerate_pairings",
    "global_sigma",
    "global_sigma_minus",
    "global_sigma_plus",
    "GlobalOperator",
    "InvalidDimensionError",
    "InvalidPhaseError",
    "local_sigma",
    "local_sigma_minus",
    "local_sigma_plus",
    "maximally_entangled",
    "maximize_over_products",
    "NotHermitianError",
    "PairingIndexSet",
    "ParameterError",
    "plus_minus_states",
    "ppt_min_eigenvalue",
    "ppt_threshold",
    "psi_mu",
    "PureState",
    "random_product_state",
    "sample_correlation",
    "scan_index_sets",
    "SeparableEnsemble",
    "SepBellError",
    "setting_decomposition",
    "SizeLimitError",
    "spectral_extremes",
    "StrategyError",
    "werner_state",
    "werner_sweep",
]
