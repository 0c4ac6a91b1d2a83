"""Dense complex matrix algebra.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Bipartite
composites use the row-major index convention ``i_A * d_B + i_B``, which is
what :func:`numpy.kron` produces, so ``kron(a, b)`` acts as ``a`` on factor A
and ``b`` on factor B.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg

from .errors import NonHermitianError, ShapeError, SizeError

MAX_DIM = 8192
HERMITIAN_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_matrix(m: Any) -> np.ndarray:
    """Coerce ``m`` to a finite 2-d ``complex128`` array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def as_square(m: Any) -> np.ndarray:
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entry magnitude of ``m - m^dagger``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - dagger(m))))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = as_square(m)
    scale = max(float(np.max(np.abs(m))), 1.0) if m.size else 1.0
    return hermiticity_defect(m) <= tol * scale


def kron(a: Any, b: Any, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product ``a ⊗ b``.

    Raises :class:`SizeError` if either output dimension would exceed
    ``max_dim``.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if rows > max_dim or cols > max_dim:
        raise SizeError(f"kron output {rows}x{cols} exceeds maximum dimension {max_dim}")
    return np.kron(a, b)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Ascending real eigenvalues of a Hermitian matrix.

    ``hermiticity_defect`` records how far the input was from Hermitian
    before it was symmetrized for the solver.
    """

    eigenvalues: np.ndarray
    hermiticity_defect: float

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])


def _check_hermitian(m: np.ndarray, tol: float) -> float:
    defect = hermiticity_defect(m)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if defect > tol * scale:
        raise NonHermitianError(defect)
    return defect


def hermitian_eigenvalues(m: Any, tol: float = HERMITIAN_TOL) -> HermitianSpectrum:
    """Eigenvalues of a Hermitian matrix, sorted ascending.

    The input must be Hermitian to relative tolerance ``tol`` (defect measured
    against the largest entry magnitude). It is symmetrized and handed to the
    dedicated Hermitian solver, so the returned spectrum is exactly real.
    """
    m = as_square(m)
    defect = _check_hermitian(m, tol)
    vals = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
    return HermitianSpectrum(eigenvalues=vals, hermiticity_defect=defect)


def hermitian_eigh(m: Any, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`hermitian_eigenvalues` but also returns the eigenvectors (as columns)."""
    m = as_square(m)
    _check_hermitian(m, tol)
    return np.linalg.eigh(0.5 * (m + dagger(m)))


def matrix_exp(m: Any) -> np.ndarray:
    """Matrix exponential.

    Hermitian and anti-Hermitian inputs go through their spectral
    decomposition; everything else uses scipy's scaling-and-squaring Padé
    routine. The zero matrix maps to the identity exactly.
    """
    m = as_square(m)
    n = m.shape[0]
    if not np.any(m):
        return np.eye(n, dtype=complex)
    scale = float(np.max(np.abs(m)))
    exact = 1e-14 * scale
    if hermiticity_defect(m) <= exact:
        vals, vecs = np.linalg.eigh(0.5 * (m + dagger(m)))
        return (vecs * np.exp(vals)) @ dagger(vecs)
    if float(np.max(np.abs(m + dagger(m)))) <= exact:
        h = -1j * m
        vals, vecs = np.linalg.eigh(0.5 * (h + dagger(h)))
        return (vecs * np.exp(1j * vals)) @ dagger(vecs)
    return scipy.linalg.expm(m)


def _bipartite(m: Any, d_a: int, d_b: int) -> np.ndarray:
    m = as_square(m)
    if d_a < 1 or d_b < 1 or m.shape[0] != d_a * d_b:
        raise ShapeError(f"matrix of size {m.shape[0]} does not factor as {d_a} x {d_b}")
    return m.reshape(d_a, d_b, d_a, d_b)


def partial_transpose(m: Any, d_a: int, d_b: int, subsystem: str = "A") -> np.ndarray:
    """Transpose factor ``subsystem`` ("A" or "B") of a ``d_a*d_b`` square matrix."""
    t = _bipartite(m, d_a, d_b)
    if subsystem == "A":
        t = t.transpose(2, 1, 0, 3)
    elif subsystem == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return np.ascontiguousarray(t).reshape(d_a * d_b, d_a * d_b)


def partial_trace(m: Any, d_a: int, d_b: int, keep: str = "A") -> np.ndarray:
    """Trace out one factor and return the reduced matrix on ``keep``."""
    t = _bipartite(m, d_a, d_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + dagger(g))


# -- matrix file format -------------------------------------------------------
# {"rows": n, "cols": m, "data": [[re, im], ...]} with entries row-major.


def matrix_to_dict(m: Any) -> dict:
    m = as_matrix(m)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ShapeError("matrix dimensions must be positive")
    if len(data) != rows * cols:
        raise ShapeError(f"matrix object has {len(data)} entries, expected {rows * cols}")
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix entries: {exc}") from exc
    return as_matrix(arr.reshape(rows, cols))


def dumps_matrix(m: Any) -> str:
    return json.dumps(matrix_to_dict(m))


def loads_matrix(text: str) -> np.ndarray:
    return matrix_from_dict(json.loads(text))
