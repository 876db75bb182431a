"""Concurrence of two-qubit states from post-selected sigma_x weak values.

Exact linear-algebra oracles, the weak-value concurrence formulas, a
Laguerre-Gaussian pointer simulation of the optical protocol, finite-photon
Monte Carlo statistics, and mixed-state robustness bounds.
"""

from .states import (
    DensityMatrix,
    InvalidStateError,
    NumericalError,
    PureTwoQubitState,
    concurrence_mixed,
    concurrence_pure,
    det2,
    entropy_direct,
    entropy_from_concurrence,
    normalized_state,
    purity,
    reduced_state,
    trace_distance,
)
from .weak_values import (
    Regime,
    WeakValuePair,
    WeakValueResult,
    classify_regime,
    sigma_x_weak_pair,
    weak_value,
)
from .estimator import (
    EstimateReport,
    McUncertainty,
    Route,
    concurrence_equatorial,
    concurrence_from_weak_values,
    concurrence_origin,
    estimate,
    estimate_from_pair,
    reconstruct_reduced_state,
    sweep_weak_value_grid,
)
from .pointer import (
    IntensityImage,
    PointerGrid,
    WeaknessWarning,
    ZeroIntensityError,
    approx_intensity,
    centroid,
    exact_intensity,
    extract_weak_value,
    lg_mode_field,
    run_optical_estimate,
    total_intensity,
)
from .photon_mc import DetectionRun, mc_centroid, mc_estimate, sample_positions
from .robustness import (
    MixednessCertificate,
    concurrence_bounds,
    mixedness_upper,
    purity_lower_bound,
    verify_appendix_bounds,
)
from .sampling import haar_random_pure_state, hilbert_schmidt_density, near_pure_mixture

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "InvalidStateError",
    "NumericalError",
    "PureTwoQubitState",
    "concurrence_mixed",
    "concurrence_pure",
    "det2",
    "entropy_direct",
    "entropy_from_concurrence",
    "normalized_state",
    "purity",
    "reduced_state",
    "trace_distance",
    "Regime",
    "WeakValuePair",
    "WeakValueResult",
    "classify_regime",
    "sigma_x_weak_pair",
    "weak_value",
    "EstimateReport",
    "McUncertainty",
    "Route",
    "concurrence_equatorial",
    "concurrence_from_weak_values",
    "concurrence_origin",
    "estimate",
    "estimate_from_pair",
    "reconstruct_reduced_state",
    "sweep_weak_value_grid",
    "IntensityImage",
    "PointerGrid",
    "WeaknessWarning",
    "ZeroIntensityError",
    "approx_intensity",
    "centroid",
    "exact_intensity",
    "extract_weak_value",
    "lg_mode_field",
    "run_optical_estimate",
    "total_intensity",
    "DetectionRun",
    "mc_centroid",
    "mc_estimate",
    "sample_positions",
    "MixednessCertificate",
    "concurrence_bounds",
    "mixedness_upper",
    "purity_lower_bound",
    "verify_appendix_bounds",
    "haar_random_pure_state",
    "hilbert_schmidt_density",
    "near_pure_mixture",
]
