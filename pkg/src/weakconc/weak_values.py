"""Post-selected weak values of sigma_x and estimation-regime classification.

All functions are pure and thread-safe.  Weak values are computed from the
matrix entries of the pre-selected one-qubit state (not from amplitudes), so
mixed reduced states reuse the same code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .states import (
    HERMITICITY_TOL,
    NORM_TOL,
    DensityMatrix,
    InvalidStateError,
    complex_to_pair,
)

__all__ = [
    "EPS_DENOMINATOR",
    "EPS_ORIGIN",
    "Regime",
    "WeakValueResult",
    "WeakValuePair",
    "weak_value",
    "sigma_x_weak_pair",
    "classify_regime",
    "pair_to_json_dict",
    "pair_from_json_dict",
]

# Post-selection probability below EPS_DENOMINATOR makes a weak value
# undefined; EPS_ORIGIN is the |w| scale below which a weak value counts as
# vanishing.  The origin threshold sits three orders above the denominator one
# so classification stays stable under grid and Monte Carlo noise; callers on
# noisy paths may widen it.
EPS_DENOMINATOR = 1e-12
EPS_ORIGIN = 1e-9


class Regime(Enum):
    REGULAR = "Regular"
    ORIGIN_SINGULAR = "OriginSingular"
    UNDEFINED = "Undefined"


@dataclass(frozen=True)
class WeakValueResult:
    """A weak value and the post-selection probability that normalizes it.

    ``value`` is None exactly when the denominator fell below the undefined
    threshold in effect on the path that produced the result.
    """

    value: complex | None
    denominator: float

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def magnitude(self) -> float:
        if self.value is None:
            raise InvalidStateError("undefined weak value has no magnitude")
        return abs(self.value)


@dataclass(frozen=True)
class WeakValuePair:
    """Both sigma_x weak values of one party plus the branch probabilities."""

    w0: WeakValueResult
    w1: WeakValueResult
    p0: float
    p1: float
    regime: Regime

    def __post_init__(self) -> None:
        if abs(self.p0 + self.p1 - 1.0) > 1e-12:
            raise InvalidStateError("branch probabilities p0 + p1 must equal 1")
        if min(self.p0, self.p1) < -1e-12:
            raise InvalidStateError("branch probabilities must be nonnegative")
        both_defined = self.w0.defined and self.w1.defined
        if self.regime is not Regime.UNDEFINED and not both_defined:
            raise InvalidStateError(
                f"regime {self.regime.value} requires both weak values defined"
            )


def classify_regime(
    w0: WeakValueResult, w1: WeakValueResult, eps_origin: float = EPS_ORIGIN
) -> Regime:
    """Regime of a weak-value pair.

    Undefined if either value is missing (vanishing post-selection
    probability); OriginSingular if both magnitudes sit below ``eps_origin``;
    Regular otherwise.
    """
    if not (w0.defined and w1.defined):
        return Regime.UNDEFINED
    if abs(w0.value) < eps_origin and abs(w1.value) < eps_origin:
        return Regime.ORIGIN_SINGULAR
    return Regime.REGULAR


def weak_value(
    observable,
    rho: DensityMatrix,
    postselect,
    eps_den: float = EPS_DENOMINATOR,
) -> WeakValueResult:
    """Post-selected weak value tr[A rho |phi><phi|] / tr[rho |phi><phi|].

    Parameters
    ----------
    observable : (2, 2) Hermitian array.
    rho : pre-selected one-qubit state.
    postselect : unit vector |phi> of dimension 2.
    eps_den : denominators below this yield the undefined marker.
    """
    obs = np.asarray(observable, dtype=complex)
    if obs.shape != (2, 2):
        raise InvalidStateError("observable must be a 2x2 matrix")
    if float(np.max(np.abs(obs - obs.conj().T))) > HERMITICITY_TOL:
        raise InvalidStateError("observable must be Hermitian")
    if not isinstance(rho, DensityMatrix) or rho.dim != 2:
        raise InvalidStateError("weak_value expects a 2x2 DensityMatrix")
    phi = np.asarray(postselect, dtype=complex).reshape(-1)
    if phi.shape != (2,):
        raise InvalidStateError("post-selection vector must have dimension 2")
    norm_sq = float(np.sum(np.abs(phi) ** 2))
    if abs(norm_sq - 1.0) > math.sqrt(NORM_TOL):
        raise InvalidStateError("post-selection vector must have unit norm")
    denom = float(np.vdot(phi, rho.matrix @ phi).real)
    if denom < eps_den:
        return WeakValueResult(None, max(denom, 0.0))
    num = complex(np.vdot(phi, obs @ rho.matrix @ phi))
    return WeakValueResult(num / denom, denom)


def sigma_x_weak_pair(
    rho: DensityMatrix,
    eps_den: float = EPS_DENOMINATOR,
    eps_origin: float = EPS_ORIGIN,
) -> WeakValuePair:
    """Both sigma_x weak values of a one-qubit state, post-selected on |0>, |1>.

    Uses the same entry convention as ``reduced_state``: rho[1, 0] = p0 * w0
    and rho[0, 1] = p1 * w1, so reconstruction round-trips exactly.
    """
    if not isinstance(rho, DensityMatrix) or rho.dim != 2:
        raise InvalidStateError("sigma_x_weak_pair expects a 2x2 DensityMatrix")
    m = rho.matrix
    p0 = max(float(m[0, 0].real), 0.0)
    p1 = max(float(m[1, 1].real), 0.0)
    w0 = (
        WeakValueResult(complex(m[1, 0]) / p0, p0)
        if p0 >= eps_den
        else WeakValueResult(None, p0)
    )
    w1 = (
        WeakValueResult(complex(m[0, 1]) / p1, p1)
        if p1 >= eps_den
        else WeakValueResult(None, p1)
    )
    return WeakValuePair(w0, w1, p0, p1, classify_regime(w0, w1, eps_origin))


def pair_to_json_dict(pair: WeakValuePair) -> dict:
    """JSON form: {"w0": [re, im] | null, "w1": ..., "p0": ..., "p1": ..., "regime": ...}."""
    return {
        "w0": complex_to_pair(pair.w0.value) if pair.w0.defined else None,
        "w1": complex_to_pair(pair.w1.value) if pair.w1.defined else None,
        "p0": float(pair.p0),
        "p1": float(pair.p1),
        "regime": pair.regime.value,
    }


def pair_from_json_dict(obj) -> WeakValuePair:
    if not isinstance(obj, dict):
        raise InvalidStateError("weak-value pair JSON must be an object")
    try:
        p0 = float(obj["p0"])
        p1 = float(obj["p1"])
        regime = Regime(obj["regime"])
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidStateError(f"malformed weak-value pair JSON: {exc}") from exc

    def result(key: str, p: float) -> WeakValueResult:
        raw = obj.get(key)
        if raw is None:
            return WeakValueResult(None, p)
        return WeakValueResult(complex(float(raw[0]), float(raw[1])), p)

    return WeakValuePair(result("w0", p0), result("w1", p1), p0, p1, regime)
