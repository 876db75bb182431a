"""Seeded random state ensembles for property sweeps and verification runs."""

from __future__ import annotations

import numpy as np

from .states import DensityMatrix, PureTwoQubitState

__all__ = [
    "as_rng",
    "haar_random_pure_state",
    "hilbert_schmidt_density",
    "near_pure_mixture",
]


def as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def haar_random_pure_state(rng) -> PureTwoQubitState:
    """Haar-uniform pure two-qubit state (normalized complex Gaussian vector)."""
    rng = as_rng(rng)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    return PureTwoQubitState(v)


def hilbert_schmidt_density(rng, dim: int = 4) -> DensityMatrix:
    """Hilbert-Schmidt distributed density matrix (normalized Ginibre product)."""
    rng = as_rng(rng)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    m /= np.trace(m).real
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m)


def near_pure_mixture(rng, eps_max: float = 0.3):
    """Convex mixture (1-eps)|psi><psi| + eps*sigma with eps ~ U[0, eps_max].

    Returns ``(psi, rho, eps)`` so callers keep the pure anchor of the sample.
    """
    rng = as_rng(rng)
    psi = haar_random_pure_state(rng)
    sigma = hilbert_schmidt_density(rng)
    eps = float(rng.uniform(0.0, eps_max))
    m = (1.0 - eps) * psi.projector().matrix + eps * sigma.matrix
    return psi, DensityMatrix(0.5 * (m + m.conj().T)), eps
