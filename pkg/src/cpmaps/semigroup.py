"""GKLS generators and the dynamical semigroups they generate.

A generator is specified by a Hamiltonian ``H``, a Kossakowski matrix ``C``
and an orthonormal basis ``{F_α}`` of traceless matrices. On observables it
reads

    L[x] = i[H, x] + Σ_{αβ} C_{αβ} (F_α† x F_β - ½{F_α† F_β, x}),

and states evolve under its Hilbert-Schmidt dual

    L#[ρ] = -i[H, ρ] + Σ_{αβ} C_{αβ} (F_β ρ F_α† - ½{F_α† F_β, ρ}).

The state-picture form is the one stored and exponentiated.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .maps import QuantumMap, is_completely_positive
from .operators import (
    as_square,
    dagger,
    hermitian_eigenvalues,
    is_hermitian,
    matrix_exp,
    matrix_from_dict,
    matrix_to_dict,
)
from .states import BLOCH_TOL, bloch_to_density, density_to_bloch

BASIS_TOL = 1e-10


def gell_mann_basis(d: int) -> list[np.ndarray]:
    """Orthonormal traceless Hermitian basis of ``M_d``, ``d² - 1`` elements.

    The generalized Gell-Mann matrices divided by ``√2`` so that
    ``Tr(F_α† F_β) = δ_αβ``. Order: symmetric ``E_jk + E_kj`` for ``j < k``
    (lexicographic), then antisymmetric ``-i E_jk + i E_kj`` in the same pair
    order, then the diagonal ones ``l = 1 .. d-1``. For ``d = 2`` this is
    ``(σ_x, σ_y, σ_z) / √2``.
    """
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    basis = []
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1
        basis.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k], m[k, j] = -1j, 1j
        basis.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        basis.append(np.sqrt(2 / (l * (l + 1))) * np.diag(diag).astype(complex))
    return [b / np.sqrt(2) for b in basis]


def _check_basis(basis: Sequence[np.ndarray], d: int) -> None:
    if len(basis) != d * d - 1:
        raise DomainError(f"basis must have {d * d - 1} elements, got {len(basis)}")
    stack = np.array(basis)
    if stack.shape[1:] != (d, d):
        raise ShapeError("basis elements must be d x d")
    gram = np.einsum("aij,bij->ab", stack.conj(), stack)
    if np.max(np.abs(gram - np.eye(len(basis)))) > BASIS_TOL:
        raise DomainError("basis is not orthonormal")
    if np.max(np.abs(np.einsum("aii->a", stack))) > BASIS_TOL:
        raise DomainError("basis elements must be traceless")


@dataclass(frozen=True)
class GklsGenerator:
    """Hamiltonian, Kossakowski matrix and operator basis of a GKLS generator."""

    hamiltonian: np.ndarray
    kossakowski: np.ndarray
    basis: tuple[np.ndarray, ...]

    def __post_init__(self):
        h = as_square(self.hamiltonian)
        c = as_square(self.kossakowski)
        d = h.shape[0]
        if d < 2:
            raise DomainError("system dimension must be >= 2")
        if c.shape[0] != d * d - 1:
            raise ShapeError(f"Kossakowski matrix must be {d * d - 1}-dimensional, got {c.shape}")
        if not is_hermitian(h, BASIS_TOL):
            raise DomainError("Hamiltonian is not Hermitian")
        if not is_hermitian(c, BASIS_TOL):
            raise DomainError("Kossakowski matrix is not Hermitian")
        basis = tuple(as_square(f) for f in self.basis)
        _check_basis(basis, d)
        for a in (h, c, *basis):
            a.flags.writeable = False
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "kossakowski", c)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_gell_mann(cls, hamiltonian: Any, kossakowski: Any) -> "GklsGenerator":
        h = as_square(hamiltonian)
        return cls(h, np.asarray(kossakowski, dtype=complex), tuple(gell_mann_basis(h.shape[0])))

    @property
    def d(self) -> int:
        return self.hamiltonian.shape[0]

    def superoperator(self) -> np.ndarray:
        """Column-stacking superoperator of the state-picture generator."""
        d = self.d
        eye = np.eye(d)
        h = self.hamiltonian
        f = np.array(self.basis)
        c = self.kossakowski
        # Σ_αβ C_αβ F_α† F_β
        anti = np.einsum("ab,aji,bjk->ik", c, f.conj(), f)
        # vec(F_β ρ F_α†) = (conj(F_α) ⊗ F_β) vec(ρ)
        jump = np.einsum("ab,aij,bkl->ikjl", c, f.conj(), f).reshape(d * d, d * d)
        comm = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
        return comm + jump - 0.5 * (np.kron(eye, anti) + np.kron(anti.T, eye))

    def heisenberg_superoperator(self) -> np.ndarray:
        """Superoperator of the generator on observables (the dual)."""
        return dagger(self.superoperator())

    def apply(self, rho: Any) -> np.ndarray:
        rho = as_square(rho)
        d = self.d
        return (self.superoperator() @ rho.reshape(-1, order="F")).reshape(d, d, order="F")


def gkls_generator(g: GklsGenerator) -> np.ndarray:
    return g.superoperator()


def evolve_map(g: GklsGenerator, t: float) -> QuantumMap:
    """Dynamical map ``exp(t L)`` at time ``t >= 0``."""
    t = float(t)
    if t < 0:
        raise DomainError(f"semigroup time must be >= 0, got {t}")
    return QuantumMap(matrix_exp(t * g.superoperator()), f"gkls(t={t!r})")


def kossakowski_is_psd(g: GklsGenerator, tol: float = 1e-12) -> bool:
    return hermitian_eigenvalues(g.kossakowski).min >= -tol


def random_generator(d: int, rng: np.random.Generator, psd: bool = True,
                     hamiltonian_scale: float = 1.0) -> GklsGenerator:
    """Random GKLS generator on the Gell-Mann basis.

    With ``psd=False`` the Kossakowski matrix is shifted so its smallest
    eigenvalue is negative.
    """
    n = d * d - 1
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = hamiltonian_scale * 0.5 * (g + dagger(g))
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    c = a @ dagger(a)
    if not psd:
        lo = np.linalg.eigvalsh(c)[0]
        top = np.linalg.eigvalsh(c)[-1]
        c = c - (lo + 0.25 * top) * np.eye(n)
    return GklsGenerator.from_gell_mann(h, 0.5 * (c + dagger(c)))


# -- the dissipative qubit ----------------------------------------------------


def qubit_pauli_generator(a: float) -> GklsGenerator:
    """``H = 0``, Pauli basis, ``C = diag(1, 1, a)``."""
    return GklsGenerator.from_gell_mann(np.zeros((2, 2)), np.diag([1.0, 1.0, float(a)]))


def qubit_bloch_solution(a: float, r0: Sequence[float], t: float) -> np.ndarray:
    """Closed-form Bloch vector of the dissipative qubit.

    ``r_t = (e^{-(1+a)t} r1, e^{-(1+a)t} r2, e^{-2t} r3)``.
    """
    r0 = np.asarray(r0, dtype=float)
    if r0.shape != (3,):
        raise ShapeError("Bloch vector must have 3 components")
    if np.linalg.norm(r0) > 1 + BLOCH_TOL:
        raise DomainError("initial Bloch vector lies outside the unit ball")
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    transverse = np.exp(-(1 + a) * t)
    return np.array([transverse * r0[0], transverse * r0[1], np.exp(-2 * t) * r0[2]])


class QubitDynamics(str, enum.Enum):
    CP = "CP"
    POSITIVE_NOT_CP = "positive_not_CP"
    NOT_POSITIVE = "not_positive"


def qubit_classification(a: float) -> QubitDynamics:
    """CP iff ``a >= 0``; positive but not CP for ``-1 <= a < 0``; else not positive."""
    if a >= 0:
        return QubitDynamics.CP
    if a >= -1:
        return QubitDynamics.POSITIVE_NOT_CP
    return QubitDynamics.NOT_POSITIVE


@dataclass(frozen=True)
class QubitEvidence:
    """Numerical support for a :func:`qubit_classification` verdict."""

    classification: QubitDynamics
    t: float
    min_choi_eigenvalue: float
    witness_bloch: np.ndarray | None = None
    witness_norm: float | None = None


def qubit_classification_evidence(a: float, t: float = 0.01) -> QubitEvidence:
    """Back the analytic verdict with the semigroup at time ``t``.

    Attaches the Choi minimum eigenvalue of ``Λ_t`` and, for non-positive
    dynamics, the image of ``r0 = (1, 0, 0)`` whose norm exceeds one. For
    ``-1 <= a < 0`` the Choi negativity only shows for ``t`` below roughly
    ``2|a|``, so ``t`` is halved until it appears; the time used is returned.
    """
    cls = qubit_classification(a)
    g = qubit_pauli_generator(a)
    lam = evolve_map(g, t)
    verdict = is_completely_positive(lam)
    while cls is QubitDynamics.POSITIVE_NOT_CP and verdict.min_choi_eigenvalue >= 0 and t > 1e-12:
        t *= 0.5
        lam = evolve_map(g, t)
        verdict = is_completely_positive(lam)
    if cls is QubitDynamics.NOT_POSITIVE:
        r = density_to_bloch(lam.apply(bloch_to_density([1.0, 0.0, 0.0])))
        return QubitEvidence(cls, t, verdict.min_choi_eigenvalue, r, float(np.linalg.norm(r)))
    return QubitEvidence(cls, t, verdict.min_choi_eigenvalue)


# -- generator file format ----------------------------------------------------
# {"d": n, "hamiltonian": <matrix>, "kossakowski": <matrix>,
#  "basis": "gell-mann" | [<matrix>, ...]}


def generator_to_dict(g: GklsGenerator, explicit_basis: bool = False) -> dict:
    basis: Any = [matrix_to_dict(f) for f in g.basis] if explicit_basis else "gell-mann"
    return {
        "d": g.d,
        "hamiltonian": matrix_to_dict(g.hamiltonian),
        "kossakowski": matrix_to_dict(g.kossakowski),
        "basis": basis,
    }


def generator_from_dict(obj: dict) -> GklsGenerator:
    try:
        d = int(obj["d"])
        h = matrix_from_dict(obj["hamiltonian"])
        c = matrix_from_dict(obj["kossakowski"])
        kind = obj.get("basis", "gell-mann")
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed generator object: {exc}") from exc
    if h.shape[0] != d:
        raise ShapeError(f"Hamiltonian has dimension {h.shape[0]}, header says {d}")
    if kind == "gell-mann":
        basis = gell_mann_basis(d)
    elif isinstance(kind, list):
        basis = [matrix_from_dict(f) for f in kind]
    else:
        raise ValueError(f"unknown basis specification {kind!r}")
    return GklsGenerator(h, c, tuple(basis))


def dumps_generator(g: GklsGenerator, explicit_basis: bool = False) -> str:
    return json.dumps(generator_to_dict(g, explicit_basis))


def loads_generator(text: str) -> GklsGenerator:
    return generator_from_dict(json.loads(text))
