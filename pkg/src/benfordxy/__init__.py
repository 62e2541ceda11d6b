"""Benford's-law violation analysis of the transverse-field XY chain.

Exact observables of the anisotropic XY model in a transverse field
(finite chains and the thermodynamic limit), sliding-window significant-
digit statistics of those observables, and finite-size scaling of the
resulting pseudo-critical points.
"""

from .benford import (
    DigitKey,
    FrequencyTable,
    benford_probabilities,
    benford_probability,
    delta_bd,
    delta_md,
    delta_sd,
    expected_table,
    observed_table,
    significant_digits,
)
from .quadrature import QuadratureError, integrate
from .scaling import (
    CubicFit,
    FitError,
    ScalingResult,
    cubic_fit,
    derivative_pseudo_critical,
    feature_window,
    profile_pseudo_critical,
    pseudo_critical,
    scaling_fit,
)
from .windows import (
    ConvergenceError,
    ConvergenceResult,
    DegenerateWindowError,
    ProfileMeta,
    ViolationProfile,
    WindowSpec,
    convergence_check,
    midpoints,
    normalize,
    profile,
    profile_set,
    window_violation,
)
from .xy_model import (
    ModelParams,
    ObservableCurve,
    ObservableKind,
    correlator_G,
    correlator_curve,
    correlators_nn,
    dispersion,
    magnetization,
    mz_curve,
    observable_curve,
)

__version__ = "1.0.0"

__all__ = [
    "DigitKey",
    "FrequencyTable",
    "benford_probabilities",
    "benford_probability",
    "delta_bd",
    "delta_md",
    "delta_sd",
    "expected_table",
    "observed_table",
    "significant_digits",
    "QuadratureError",
    "integrate",
    "CubicFit",
    "FitError",
    "ScalingResult",
    "cubic_fit",
    "derivative_pseudo_critical",
    "feature_window",
    "profile_pseudo_critical",
    "pseudo_critical",
    "scaling_fit",
    "ConvergenceError",
    "ConvergenceResult",
    "DegenerateWindowError",
    "ProfileMeta",
    "ViolationProfile",
    "WindowSpec",
    "convergence_check",
    "midpoints",
    "normalize",
    "profile",
    "profile_set",
    "window_violation",
    "ModelParams",
    "ObservableCurve",
    "ObservableKind",
    "correlator_G",
    "correlator_curve",
    "correlators_nn",
    "dispersion",
    "magnetization",
    "mz_curve",
    "observable_curve",
    "__version__",
]
