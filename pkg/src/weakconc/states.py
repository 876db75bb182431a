"""Exact linear algebra for two-qubit states.

Value types (pure states and density matrices) validate their physical
invariants at construction and are immutable afterwards.  Every operation in
this module is a pure function over those types, safe to call concurrently
from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NORM_TOL",
    "HERMITICITY_TOL",
    "TRACE_TOL",
    "POSITIVITY_SLACK",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "IDENTITY2",
    "InvalidStateError",
    "NumericalError",
    "PureTwoQubitState",
    "DensityMatrix",
    "normalized_state",
    "hermitian_eigenvalues",
    "reduced_state",
    "concurrence_pure",
    "concurrence_mixed",
    "entropy_from_concurrence",
    "entropy_direct",
    "trace_distance",
    "purity",
    "det2",
    "complex_to_pair",
    "matrix_to_pairs",
    "pairs_to_matrix",
    "state_to_json_dict",
    "state_from_json_dict",
    "density_from_json_rows",
]

NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_SLACK = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)


class InvalidStateError(ValueError):
    """An input violates a declared invariant; the message names the first one."""


class NumericalError(RuntimeError):
    """A computation cannot proceed for numerical reasons (e.g. no signal)."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureTwoQubitState:
    """Unit-norm two-qubit state; amplitudes ordered (a00, a01, a10, a11).

    Construction rejects non-normalized input instead of silently rescaling,
    so the provenance of test inputs stays exact; use :func:`normalized_state`
    to normalize explicitly.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (4,):
            raise InvalidStateError(
                "pure state needs exactly 4 amplitudes (a00, a01, a10, a11)"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("amplitudes must be finite (no NaN or infinity)")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise InvalidStateError(
                f"state norm: sum |a_ij|^2 must equal 1 within {NORM_TOL} "
                f"(got {norm_sq!r})"
            )
        object.__setattr__(self, "amplitudes", _freeze(amps.copy()))

    @property
    def a00(self) -> complex:
        return complex(self.amplitudes[0])

    @property
    def a01(self) -> complex:
        return complex(self.amplitudes[1])

    @property
    def a10(self) -> complex:
        return complex(self.amplitudes[2])

    @property
    def a11(self) -> complex:
        return complex(self.amplitudes[3])

    def projector(self) -> "DensityMatrix":
        """Rank-1 joint density matrix |psi><psi|."""
        amps = self.amplitudes
        return DensityMatrix(np.outer(amps, amps.conj()))


def normalized_state(amplitudes) -> PureTwoQubitState:
    """Normalize raw amplitudes into a valid state (rejects the zero vector)."""
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.shape != (4,):
        raise InvalidStateError(
            "pure state needs exactly 4 amplitudes (a00, a01, a10, a11)"
        )
    if not np.all(np.isfinite(amps)):
        raise InvalidStateError("amplitudes must be finite (no NaN or infinity)")
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise InvalidStateError("cannot normalize the zero vector")
    return PureTwoQubitState(amps / norm)


def hermitian_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    2x2 inputs use the closed form; larger ones the LAPACK Hermitian solver.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.shape == (2, 2):
        a = m[0, 0].real
        d = m[1, 1].real
        s = 0.5 * (a + d)
        r = math.hypot(0.5 * (a - d), abs(m[0, 1]))
        return np.array([s - r, s + r])
    return np.linalg.eigvalsh(m)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive matrix of dimension 2 or 4."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] not in (2, 4):
            raise InvalidStateError("density matrix must be square of dimension 2 or 4")
        if not np.all(np.isfinite(mat)):
            raise InvalidStateError("density matrix entries must be finite")
        if float(np.max(np.abs(mat - mat.conj().T))) > HERMITICITY_TOL:
            raise InvalidStateError(
                f"density matrix must be Hermitian within {HERMITICITY_TOL}"
            )
        if abs(complex(np.trace(mat)) - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"density matrix trace must be 1 within {TRACE_TOL}")
        if float(hermitian_eigenvalues(mat)[0]) < -POSITIVITY_SLACK:
            raise InvalidStateError(
                "density matrix must be positive semidefinite "
                f"(eigenvalues >= -{POSITIVITY_SLACK})"
            )
        object.__setattr__(self, "matrix", _freeze(mat.copy()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_joint_matrix(state) -> np.ndarray:
    if isinstance(state, PureTwoQubitState):
        amps = state.amplitudes
        return np.outer(amps, amps.conj())
    if isinstance(state, DensityMatrix):
        if state.dim != 4:
            raise InvalidStateError("reduction needs a two-qubit (4x4) density matrix")
        return state.matrix
    raise InvalidStateError("expected a PureTwoQubitState or a 4x4 DensityMatrix")


def reduced_state(state, subsystem: str = "A") -> DensityMatrix:
    """One-qubit state of subsystem ``A`` or ``B`` of a two-qubit input.

    Entry convention: for amplitudes a_ij the reduced matrix of A carries
    rho[0, 1] = a00* a10 + a01* a11 (and rho[1, 0] its conjugate), i.e. the
    tomographic layout in which rho[1, 0] = p0 * w0 for the sigma_x weak pair.
    This is the transpose of the ket-index partial trace; all spectral
    quantities (trace, determinant, entropy, distances) are unaffected.
    """
    rho4 = _as_joint_matrix(state)
    r = rho4.reshape(2, 2, 2, 2)
    if subsystem == "A":
        red = np.einsum("ijkj->ki", r)
    elif subsystem == "B":
        red = np.einsum("ijil->lj", r)
    else:
        raise InvalidStateError("subsystem must be 'A' or 'B'")
    red = 0.5 * (red + red.conj().T)
    return DensityMatrix(red)


def concurrence_pure(state: PureTwoQubitState) -> float:
    """Concurrence 2 |a00 a11 - a01 a10| of a pure two-qubit state."""
    if not isinstance(state, PureTwoQubitState):
        raise InvalidStateError("concurrence_pure expects a PureTwoQubitState")
    a = state.amplitudes
    return float(2.0 * abs(a[0] * a[3] - a[1] * a[2]))


def concurrence_mixed(rho: DensityMatrix) -> float:
    """Concurrence of an arbitrary two-qubit state (spin-flip eigenvalue formula).

    Computed through the Hermitian product sqrt(rho) (Y x Y) rho* (Y x Y)
    sqrt(rho); eigenvalues below 1e-12 of the largest are treated as exact
    zeros so that rank-deficient (pure) inputs do not pick up sqrt-amplified
    noise.
    """
    if not isinstance(rho, DensityMatrix) or rho.dim != 4:
        raise InvalidStateError("concurrence_mixed expects a 4x4 DensityMatrix")
    m = rho.matrix
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    flipped = yy @ m.conj() @ yy
    evals, vecs = np.linalg.eigh(m)
    sqrt_m = (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ vecs.conj().T
    prod = sqrt_m @ flipped @ sqrt_m
    prod = 0.5 * (prod + prod.conj().T)
    lam = np.clip(np.linalg.eigvalsh(prod), 0.0, None)
    if lam[-1] > 0.0:
        lam[lam < 1e-12 * lam[-1]] = 0.0
    roots = np.sqrt(lam)  # ascending
    return float(max(0.0, roots[3] - roots[2] - roots[1] - roots[0]))


def _binary_entropy(x: float) -> float:
    e = 0.0
    for t in (x, 1.0 - x):
        if t > 0.0:
            e -= t * math.log2(t)
    return e


def entropy_from_concurrence(c: float) -> float:
    """Entanglement entropy (in bits) of a pure state with concurrence ``c``.

    Binary entropy of (1 + sqrt(1 - c^2)) / 2, with the 0 log 0 := 0
    convention at the endpoints; monotone increasing on [0, 1].
    """
    if not math.isfinite(c) or c < -1e-12 or c > 1.0 + 1e-12:
        raise InvalidStateError("concurrence must lie in [0, 1]")
    c = min(max(c, 0.0), 1.0)
    x = 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c)))
    return _binary_entropy(x)


def entropy_direct(rho: DensityMatrix) -> float:
    """Von Neumann entropy -sum(l log2 l) in bits, with 0 log 0 := 0.

    Eigenvalues inside the positivity slack are clamped to [0, 1] before the
    logarithm (the formula is singular at exact zeros).
    """
    evals = np.clip(hermitian_eigenvalues(rho.matrix), 0.0, 1.0)
    return float(-sum(v * math.log2(v) for v in evals if v > 0.0))


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Trace distance, half the absolute-eigenvalue sum of the difference."""
    if rho1.dim != rho2.dim:
        raise InvalidStateError("trace distance requires equal dimensions")
    diff = rho1.matrix - rho2.matrix
    return float(0.5 * np.sum(np.abs(hermitian_eigenvalues(diff))))


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), computed as the squared Frobenius norm of a Hermitian matrix."""
    return float(np.sum(np.abs(rho.matrix) ** 2))


def det2(rho: DensityMatrix) -> float:
    """Determinant of a one-qubit density matrix (real, in [0, 1/4])."""
    if rho.dim != 2:
        raise InvalidStateError("det2 expects a 2x2 DensityMatrix")
    m = rho.matrix
    return float(m[0, 0].real * m[1, 1].real - abs(m[0, 1]) ** 2)


# --- JSON wire formats -------------------------------------------------------
#
# Pure states:       {"amplitudes": [[re, im], [re, im], [re, im], [re, im]]}
# Density matrices:  row-major nested [[ [re, im], ... ], ...]


def complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _pair_to_complex(pair, what: str) -> complex:
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(v, (int, float)) for v in pair)
    ):
        raise InvalidStateError(f"{what} must be a [re, im] pair of numbers")
    return complex(float(pair[0]), float(pair[1]))


def matrix_to_pairs(matrix: np.ndarray) -> list[list[list[float]]]:
    m = np.asarray(matrix, dtype=complex)
    return [[complex_to_pair(z) for z in row] for row in m]


def pairs_to_matrix(rows) -> np.ndarray:
    if not isinstance(rows, (list, tuple)) or not rows:
        raise InvalidStateError("matrix JSON must be a non-empty list of rows")
    n = len(rows)
    out = np.zeros((n, len(rows[0])), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, (list, tuple)) or len(row) != out.shape[1]:
            raise InvalidStateError("matrix JSON rows must all have the same length")
        for j, pair in enumerate(row):
            out[i, j] = _pair_to_complex(pair, f"matrix entry ({i},{j})")
    return out


def state_to_json_dict(state: PureTwoQubitState) -> dict:
    return {"amplitudes": [complex_to_pair(z) for z in state.amplitudes]}


def state_from_json_dict(obj) -> PureTwoQubitState:
    if not isinstance(obj, dict) or "amplitudes" not in obj:
        raise InvalidStateError('state JSON must carry an "amplitudes" field')
    amps = obj["amplitudes"]
    if not isinstance(amps, (list, tuple)) or len(amps) != 4:
        raise InvalidStateError(
            "amplitudes must list exactly 4 [re, im] pairs (a00, a01, a10, a11)"
        )
    values = [_pair_to_complex(p, f"amplitude {i}") for i, p in enumerate(amps)]
    return PureTwoQubitState(np.array(values, dtype=complex))


def density_from_json_rows(rows) -> DensityMatrix:
    return DensityMatrix(pairs_to_matrix(rows))
