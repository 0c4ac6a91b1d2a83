"""State families on single and bipartite qudit systems.

Density matrices are returned as ``complex128`` arrays. The maximally
entangled vector is built in the computational basis,
``|Ψ⟩ = d^{-1/2} Σ_j |j⟩⊗|j⟩``.
"""
from __future__ import annotations

import json
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .operators import (
    PAULIS,
    as_square,
    hermitian_eigenvalues,
    hermiticity_defect,
    kron,
    matrix_from_dict,
    matrix_to_dict,
    partial_transpose,
)

PSD_RTOL = 1e-10
TRACE_TOL = 1e-12
BLOCH_TOL = 1e-12


def psd_tolerance(eigenvalues: np.ndarray) -> float:
    """Negativity allowed before a spectrum stops counting as positive.

    Relative to the largest eigenvalue magnitude, since constructed
    matrices only carry rounding error.
    """
    eigenvalues = np.asarray(eigenvalues)
    if eigenvalues.size == 0:
        return 0.0
    return PSD_RTOL * float(np.max(np.abs(eigenvalues)))


def is_psd(m: Any) -> bool:
    vals = hermitian_eigenvalues(m).eigenvalues
    return bool(vals[0] >= -psd_tolerance(vals))


def check_density(rho: Any) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as an array.

    Raises :class:`DomainError` if it is not Hermitian, not of unit trace,
    or has an eigenvalue below ``-psd_tolerance``.
    """
    rho = as_square(rho)
    if hermiticity_defect(rho) > 1e-9 * max(float(np.max(np.abs(rho))), 1.0):
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise DomainError(f"density matrix trace is {tr.real:.15g}, expected 1")
    vals = hermitian_eigenvalues(rho).eigenvalues
    if vals[0] < -psd_tolerance(vals):
        raise DomainError(f"density matrix has negative eigenvalue {vals[0]:.3e}")
    return rho


def is_density(rho: Any) -> bool:
    try:
        check_density(rho)
    except (DomainError, ShapeError, ValueError):
        return False
    return True


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise DomainError(f"local dimension must be an integer >= 2, got {d}")
    return int(d)


def max_entangled_vector(d: int) -> np.ndarray:
    d = _check_dim(d)
    psi = np.zeros(d * d, dtype=complex)
    psi[:: d + 1] = 1 / np.sqrt(d)
    return psi


def max_symmetric_projector(d: int) -> np.ndarray:
    """Rank-one projector onto ``d^{-1/2} Σ_j |jj⟩``, a ``d² x d²`` state."""
    d = _check_dim(d)
    p = np.zeros((d * d, d * d), dtype=complex)
    idx = np.arange(d) * (d + 1)
    p[np.ix_(idx, idx)] = 1.0 / d
    return p


def flip_operator(d: int) -> np.ndarray:
    """Swap operator ``V|ψ⊗φ⟩ = |φ⊗ψ⟩`` on ``C^d ⊗ C^d``."""
    d = _check_dim(d)
    v = np.zeros((d * d, d * d), dtype=complex)
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    v[(k * d + j).ravel(), (j * d + k).ravel()] = 1.0
    return v


def _check_fidelity(d: int, F: float) -> tuple[int, float]:
    d = _check_dim(d)
    F = float(F)
    if not 0.0 <= F <= 1.0:
        raise DomainError(f"isotropic parameter F must lie in [0, 1], got {F}")
    return d, F


def isotropic_state(d: int, F: float) -> np.ndarray:
    """Isotropic two-qudit state with singlet fraction ``F``.

    Mixes the maximally mixed state with the maximally entangled projector;
    the spectrum is ``F`` once and ``(1-F)/(d²-1)`` with multiplicity ``d²-1``.
    """
    d, F = _check_fidelity(d, F)
    n = d * d
    return (1 - F) / (n - 1) * np.eye(n, dtype=complex) + (n * F - 1) / (n - 1) * max_symmetric_projector(d)


def isotropic_is_entangled(d: int, F: float) -> bool:
    """Isotropic states are separable for ``F <= 1/d`` and entangled above."""
    d, F = _check_fidelity(d, F)
    return F > 1.0 / d


def min_partial_transpose_eigenvalue(rho: Any, d_a: int, d_b: int) -> float:
    return hermitian_eigenvalues(partial_transpose(rho, d_a, d_b, "A")).min


def is_ppt(rho: Any, d_a: int, d_b: int) -> bool:
    """Positive partial transpose test, tolerance relative to the spectrum scale."""
    vals = hermitian_eigenvalues(partial_transpose(rho, d_a, d_b, "A")).eigenvalues
    return bool(vals[0] >= -psd_tolerance(vals))


def bloch_to_density(r: Sequence[float]) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ShapeError(f"Bloch vector must have 3 components, got shape {r.shape}")
    if np.linalg.norm(r) > 1 + BLOCH_TOL:
        raise DomainError(f"Bloch vector norm {np.linalg.norm(r):.15g} exceeds 1")
    return 0.5 * (np.eye(2, dtype=complex) + sum(c * s for c, s in zip(r, PAULIS)))


def density_to_bloch(rho: Any) -> np.ndarray:
    """Bloch components ``r_k = Tr(ρ σ_k)`` of a qubit operator.

    Works on any 2x2 matrix so that evolved, possibly non-physical, images
    can be inspected too.
    """
    rho = as_square(rho)
    if rho.shape != (2, 2):
        raise ShapeError(f"Bloch representation needs a 2x2 matrix, got {rho.shape}")
    return np.array([np.trace(rho @ s).real for s in PAULIS])


def separable_mixture(
    weights: Sequence[float],
    factors_a: Sequence[np.ndarray],
    factors_b: Sequence[np.ndarray],
) -> np.ndarray:
    """Convex combination ``Σ_j λ_j ρ_j ⊗ σ_j`` of product states."""
    weights = np.asarray(weights, dtype=float)
    if len(factors_a) != len(weights) or len(factors_b) != len(weights):
        raise ShapeError("weights and factor lists must have equal length")
    if len(weights) == 0:
        raise DomainError("separable mixture needs at least one term")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise DomainError("weights must be nonnegative and sum to 1")
    rhos = [check_density(a) for a in factors_a]
    sigmas = [check_density(b) for b in factors_b]
    if len({r.shape for r in rhos}) != 1 or len({s.shape for s in sigmas}) != 1:
        raise ShapeError("all factors on one side must share a dimension")
    return sum(w * kron(r, s) for w, r, s in zip(weights, rhos, sigmas))


def random_density(d: int, seed: int) -> np.ndarray:
    """Full-rank random state ``G G† / Tr(G G†)`` with seeded Ginibre ``G``."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


# -- state file format --------------------------------------------------------
# Matrix object plus an optional {"kind": ..., "params": {...}} header.


def state_to_dict(rho: Any, kind: str | None = None, params: dict | None = None) -> dict:
    obj = matrix_to_dict(rho)
    if kind is not None:
        obj = {"kind": kind, "params": dict(params or {}), **obj}
    return obj


def state_from_dict(obj: dict) -> np.ndarray:
    """Load a state object.

    Named families ("isotropic", "symmetric-projector") are rebuilt from
    their parameters when no explicit matrix is given, and cross-checked
    against it when one is.
    """
    kind = obj.get("kind")
    params = obj.get("params", {})
    built = None
    if kind == "isotropic":
        built = isotropic_state(params["d"], params["F"])
    elif kind == "symmetric-projector":
        built = max_symmetric_projector(params["d"])
    elif kind not in (None, "matrix"):
        raise ValueError(f"unknown state kind {kind!r}")
    if "data" in obj:
        rho = matrix_from_dict(obj)
        if built is not None and not np.allclose(rho, built, atol=1e-12):
            raise ValueError(f"matrix payload does not match {kind} parameters")
        return rho
    if built is None:
        raise ValueError("state object has neither matrix data nor a named kind")
    return built


def dumps_state(rho: Any, kind: str | None = None, params: dict | None = None) -> str:
    return json.dumps(state_to_dict(rho, kind, params))


def loads_state(text: str) -> np.ndarray:
    return state_from_dict(json.loads(text))
