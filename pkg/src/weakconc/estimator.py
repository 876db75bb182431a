"""Concurrence estimation from sigma_x weak values.

Dispatch: Regular pairs go through the weak-value formula, vanishing pairs
through the diagonal-intensity fallback (valid for pure joint states), and
undefined pairs return the analytic limit C = 0.  The module also reconstructs
the reduced one-qubit state from a measured pair and generates the
weak-value-magnitude sweep surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .states import (
    DensityMatrix,
    InvalidStateError,
    entropy_from_concurrence,
    det2,
    matrix_to_pairs,
)
from .weak_values import (
    EPS_DENOMINATOR,
    EPS_ORIGIN,
    Regime,
    WeakValuePair,
    pair_to_json_dict,
    sigma_x_weak_pair,
)

__all__ = [
    "PRODUCT_TOL",
    "Route",
    "McUncertainty",
    "EstimateReport",
    "concurrence_from_weak_values",
    "concurrence_equatorial",
    "concurrence_origin",
    "reconstruct_reduced_state",
    "estimate",
    "estimate_from_pair",
    "sweep_weak_value_grid",
    "write_sweep_csv",
    "report_to_json_dict",
]

# Measured magnitudes may overshoot the physical bound |w0||w1| <= 1 by float
# noise; products within PRODUCT_TOL are clamped to 1, larger ones rejected.
PRODUCT_TOL = 1e-9


class Route(Enum):
    WEAK_VALUE_FORMULA = "WeakValueFormula"
    EQUATORIAL = "Equatorial"
    DIAGONAL_INTENSITY = "DiagonalIntensity"
    UNDEFINED_LIMIT = "UndefinedLimit"


@dataclass(frozen=True)
class McUncertainty:
    """Bootstrap spread of a Monte Carlo concurrence estimate."""

    sigma: float
    ci_low: float
    ci_high: float
    n_resamples: int


@dataclass(frozen=True)
class EstimateReport:
    """Concurrence estimate with its route, entropy, and reconstruction."""

    concurrence: float
    route: Route
    entropy: float
    pair: WeakValuePair
    reconstructed_rho: DensityMatrix
    diagnostics: dict
    uncertainty: McUncertainty | None = None


def concurrence_from_weak_values(
    m0: float,
    m1: float,
    product_tol: float = PRODUCT_TOL,
    clamp_excess: bool = False,
) -> float:
    """Concurrence from the two weak-value magnitudes.

    sqrt of 4 (1 - m0 m1) m0 m1 / (m0 + m1)^2; symmetric in its arguments and
    valid whenever at least one magnitude is nonzero.  ``clamp_excess`` lets
    noisy measurement paths clamp any product above 1 instead of erroring.
    """
    if not (m0 >= 0.0 and m1 >= 0.0):
        raise InvalidStateError("weak-value magnitudes must be nonnegative")
    if m0 == 0.0 and m1 == 0.0:
        raise InvalidStateError(
            "both weak values vanish; use the diagonal-intensity route"
        )
    product = m0 * m1
    if product > 1.0:
        if not clamp_excess and product > 1.0 + product_tol:
            raise InvalidStateError(
                f"|w0| |w1| = {product!r} exceeds 1 beyond tolerance; "
                "not a physical weak-value pair"
            )
        product = 1.0
    csq = 4.0 * (1.0 - product) * product / (m0 + m1) ** 2
    return math.sqrt(min(max(csq, 0.0), 1.0))


def concurrence_equatorial(m: float) -> float:
    """Concurrence sqrt(1 - m^2) on the equal-magnitude (equatorial) line."""
    if not 0.0 <= m <= 1.0 + PRODUCT_TOL:
        raise InvalidStateError("equatorial magnitude must lie in [0, 1]")
    return math.sqrt(max(0.0, 1.0 - min(m, 1.0) ** 2))


def concurrence_origin(p0: float, p1: float) -> float:
    """Concurrence 2 sqrt(p0 p1) of a pure source with a diagonal reduced state.

    Valid only under the pure-source assumption; mixed-state callers should
    use the robustness bounds instead.
    """
    if p0 < 0.0 or p1 < 0.0:
        raise InvalidStateError("branch probabilities must be nonnegative")
    if abs(p0 + p1 - 1.0) > 1e-9:
        raise InvalidStateError("branch probabilities must sum to 1")
    return 2.0 * math.sqrt(p0 * p1)


def reconstruct_reduced_state(
    pair: WeakValuePair, consistency_tol: float = 1e-6
) -> DensityMatrix:
    """Reduced one-qubit state from a weak-value pair.

    Diagonal from (p0, p1); the off-diagonal from p0 w0 and conj(p1 w1),
    averaged.  A mismatch between the two beyond ``consistency_tol`` signals
    corrupted measurement data.  The off-diagonal magnitude is clamped to
    sqrt(p0 p1) so noisy pairs still yield a positive matrix.
    """
    p0 = max(float(pair.p0), 0.0)
    p1 = max(float(pair.p1), 0.0)
    lower_candidates = []
    if pair.w0.defined:
        lower_candidates.append(p0 * pair.w0.value)
    if pair.w1.defined:
        lower_candidates.append(np.conj(p1 * pair.w1.value))
    if len(lower_candidates) == 2:
        mismatch = abs(lower_candidates[0] - lower_candidates[1])
        if mismatch > consistency_tol:
            raise InvalidStateError(
                f"inconsistent pair: |p0 w0 - conj(p1 w1)| = {mismatch!r} exceeds "
                f"{consistency_tol} (corrupted measurement data)"
            )
        lower = 0.5 * (lower_candidates[0] + lower_candidates[1])
    elif lower_candidates:
        lower = complex(lower_candidates[0])
    else:
        lower = 0.0 + 0.0j
    max_mag = math.sqrt(p0 * p1)
    if abs(lower) > max_mag:
        lower = lower * (max_mag / abs(lower))
    matrix = np.array([[p0, np.conj(lower)], [lower, p1]], dtype=complex)
    return DensityMatrix(matrix)


def estimate_from_pair(
    pair: WeakValuePair,
    consistency_tol: float = 1e-6,
    clamp_product: bool = False,
    extra_diagnostics: dict | None = None,
    uncertainty: McUncertainty | None = None,
) -> EstimateReport:
    """Dispatch a weak-value pair to the matching concurrence route."""
    diagnostics: dict = {}
    if pair.regime is Regime.UNDEFINED:
        # A vanishing post-selection probability forces a product state.
        conc = 0.0
        route = Route.UNDEFINED_LIMIT
    elif pair.regime is Regime.ORIGIN_SINGULAR:
        conc = concurrence_origin(pair.p0, pair.p1)
        route = Route.DIAGONAL_INTENSITY
        diagnostics["assumes_pure_source"] = 1.0
    else:
        m0 = pair.w0.magnitude
        m1 = pair.w1.magnitude
        conc = concurrence_from_weak_values(m0, m1, clamp_excess=clamp_product)
        route = Route.WEAK_VALUE_FORMULA
        diagnostics["abs_w0"] = m0
        diagnostics["abs_w1"] = m1
        diagnostics["weak_value_product"] = m0 * m1
    reconstructed = reconstruct_reduced_state(pair, consistency_tol=consistency_tol)
    diagnostics["det_reconstructed"] = det2(reconstructed)
    if extra_diagnostics:
        diagnostics.update(extra_diagnostics)
    return EstimateReport(
        concurrence=conc,
        route=route,
        entropy=entropy_from_concurrence(conc),
        pair=pair,
        reconstructed_rho=reconstructed,
        diagnostics=diagnostics,
        uncertainty=uncertainty,
    )


def estimate(
    rho: DensityMatrix,
    eps_den: float = EPS_DENOMINATOR,
    eps_origin: float = EPS_ORIGIN,
) -> EstimateReport:
    """Concurrence of the pure two-qubit source from one reduced state."""
    pair = sigma_x_weak_pair(rho, eps_den=eps_den, eps_origin=eps_origin)
    return estimate_from_pair(pair)


def sweep_weak_value_grid(n: int = 201, upper: float = 2.0) -> np.ndarray:
    """(n*n, 3) array of rows (m0, m1, C) on a uniform grid over [0, upper]^2.

    NaN marks the excluded region m0 m1 > 1 and the singular origin (0, 0).
    Rows are ordered with m0 as the slow index, so output is deterministic
    however the evaluation is parallelized.
    """
    if n < 2:
        raise InvalidStateError("sweep grid needs at least 2 points per axis")
    m = np.linspace(0.0, upper, n)
    m0 = np.repeat(m, n)
    m1 = np.tile(m, n)
    product = m0 * m1
    total = m0 + m1
    c = np.full(n * n, np.nan)
    mask = (product <= 1.0) & (total > 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        csq = 4.0 * (1.0 - product) * product / total**2
    c[mask] = np.sqrt(np.clip(csq[mask], 0.0, 1.0))
    return np.column_stack([m0, m1, c])


def write_sweep_csv(rows: np.ndarray, fh) -> None:
    """Write sweep rows as CSV with header ``m0,m1,C``; NaN prints as ``nan``."""
    fh.write("m0,m1,C\n")
    for m0, m1, c in rows:
        fh.write(f"{float(m0)!r},{float(m1)!r},{float(c)!r}\n")


def report_to_json_dict(report: EstimateReport) -> dict:
    out = {
        "concurrence": float(report.concurrence),
        "route": report.route.value,
        "entropy": float(report.entropy),
        "pair": pair_to_json_dict(report.pair),
        "reconstructed_rho": matrix_to_pairs(report.reconstructed_rho.matrix),
        "diagnostics": {k: float(v) for k, v in report.diagnostics.items()},
        "uncertainty": None,
    }
    if report.uncertainty is not None:
        out["uncertainty"] = {
            "sigma": float(report.uncertainty.sigma),
            "ci_low": float(report.uncertainty.ci_low),
            "ci_high": float(report.uncertainty.ci_high),
            "n_resamples": int(report.uncertainty.n_resamples),
        }
    return out
