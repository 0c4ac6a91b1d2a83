"""Linear maps on ``d x d`` matrices and the Choi criterion for complete positivity.

Conventions, fixed for the whole package:

* The canonical representation is the superoperator matrix ``S`` acting on
  column-stacked matrices, ``vec(Λ[X]) = S vec(X)`` with
  ``vec(X) = X.reshape(-1, order="F")``. A Kraus set ``{K}`` gives
  ``S = Σ conj(K) ⊗ K``.
* The Choi matrix lets the map act on the FIRST tensor factor of the
  normalized maximally entangled projector, ``C = (Λ ⊗ id)[P]`` with
  ``Tr P = 1``. Trace-preserving maps therefore have ``Tr C = 1``.
* Kraus operators act as ``ρ ↦ Σ K ρ K†`` (state picture).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, NotCPError, ShapeError, SizeError
from .operators import (
    MAX_DIM,
    as_square,
    dagger,
    hermitian_eigh,
    is_hermitian,
    matrix_from_dict,
    matrix_to_dict,
)
from .states import max_symmetric_projector, psd_tolerance, random_pure_state

ROUND_TRIP_TOL = 1e-10
KRAUS_RTOL = 1e-12


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


def _tensor_from_superop(s: np.ndarray, d: int) -> np.ndarray:
    # T[i, j, k, l] = Λ[E_kl]_ij
    return s.reshape(d, d, d, d).transpose(1, 0, 3, 2)


def _superop_from_tensor(t: np.ndarray) -> np.ndarray:
    d = t.shape[0]
    return np.ascontiguousarray(t.transpose(1, 0, 3, 2)).reshape(d * d, d * d)


def _dim_from_square(n: int, what: str) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n or d < 1:
        raise ShapeError(f"{what} has size {n}, which is not a perfect square")
    return d


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


class QuantumMap:
    """Linear map on ``d x d`` matrices.

    Build one with :meth:`from_superoperator`, :meth:`from_kraus` or
    :meth:`from_choi`; all three representations are available afterwards
    through :attr:`superoperator`, :attr:`choi` and :meth:`kraus`. Instances
    are immutable and the stored arrays are read-only.
    """

    __slots__ = ("d", "superoperator", "choi", "name", "representation", "_kraus")

    def __init__(self, superoperator: Any, name: str | None = None, *,
                 representation: str = "superoperator",
                 kraus: Sequence[np.ndarray] | None = None):
        s = as_square(superoperator)
        d = _dim_from_square(s.shape[0], "superoperator")
        self.d = d
        self.superoperator = _readonly(s)
        t = _tensor_from_superop(self.superoperator, d)
        self.choi = _readonly(t.transpose(0, 2, 1, 3).reshape(d * d, d * d) / d)
        self.name = name
        self.representation = representation
        self._kraus = None if kraus is None else tuple(_readonly(k) for k in kraus)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<QuantumMap{label} d={self.d} from {self.representation}>"

    @classmethod
    def from_superoperator(cls, s: Any, name: str | None = None) -> "QuantumMap":
        return cls(s, name)

    @classmethod
    def from_kraus(cls, operators: Sequence[Any], name: str | None = None) -> "QuantumMap":
        ops = [as_square(k) for k in operators]
        if not ops:
            raise ShapeError("Kraus set must contain at least one operator")
        if len({k.shape for k in ops}) != 1:
            raise ShapeError("Kraus operators must share one shape")
        s = sum(np.kron(np.conj(k), k) for k in ops)
        return cls(s, name, representation="kraus", kraus=ops)

    @classmethod
    def from_choi(cls, c: Any, name: str | None = None) -> "QuantumMap":
        c = as_square(c)
        d = _dim_from_square(c.shape[0], "Choi matrix")
        t = (d * c).reshape(d, d, d, d).transpose(0, 2, 1, 3)
        return cls(_superop_from_tensor(t), name, representation="choi")

    @property
    def tensor(self) -> np.ndarray:
        """``T[i, j, k, l] = Λ[|k⟩⟨l|]_{ij}``."""
        return _tensor_from_superop(self.superoperator, self.d)

    def apply(self, x: Any) -> np.ndarray:
        x = as_square(x)
        if x.shape[0] != self.d:
            raise ShapeError(f"map acts on {self.d}x{self.d} matrices, got {x.shape}")
        return unvec(self.superoperator @ vec(x), self.d)

    def __call__(self, x: Any) -> np.ndarray:
        return self.apply(x)

    def kraus(self, tol: float = KRAUS_RTOL) -> list[np.ndarray]:
        """Kraus operators; the stored set if built from one, else from the Choi spectrum."""
        if self._kraus is not None:
            return [np.array(k) for k in self._kraus]
        return kraus_from_choi(self.choi, tol)

    def compose(self, other: "QuantumMap") -> "QuantumMap":
        """``self ∘ other``: apply ``other`` first."""
        if other.d != self.d:
            raise ShapeError("cannot compose maps of different dimension")
        return QuantumMap(self.superoperator @ other.superoperator)

    def dual(self) -> "QuantumMap":
        """Hilbert-Schmidt adjoint, ``Tr(A† Λ[B]) = Tr(Λ^#[A]† B)``."""
        name = f"{self.name}^#" if self.name else None
        return QuantumMap(dagger(self.superoperator), name)

    def is_hermiticity_preserving(self, tol: float = 1e-9) -> bool:
        return is_hermitian(self.choi, tol)


def apply(m: QuantumMap, x: Any) -> np.ndarray:
    return m.apply(x)


def choi(m: QuantumMap) -> np.ndarray:
    return np.array(m.choi)


def compose(*maps: QuantumMap) -> QuantumMap:
    """Composition right to left, ``compose(a, b)[x] = a[b[x]]``."""
    if not maps:
        raise ValueError("need at least one map")
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = m.compose(out)
    return out


def apply_lifted(m: QuantumMap, x: Any, n: int) -> np.ndarray:
    """``(Λ ⊗ id_n)[x]`` computed directly, without the lifted superoperator."""
    x = as_square(x)
    d = m.d
    if x.shape[0] != d * n:
        raise ShapeError(f"lifted map acts on size {d * n}, got {x.shape}")
    x4 = x.reshape(d, n, d, n)
    out = np.einsum("pqrs,rbsc->pbqc", m.tensor, x4)
    return out.reshape(d * n, d * n)


def lift(m: QuantumMap, n: int, max_dim: int = MAX_DIM) -> QuantumMap:
    """Extend ``m`` to ``m ⊗ id_n`` on a composite with an inert ``n``-level ancilla."""
    if int(n) != n or n < 1:
        raise DomainError(f"ancilla dimension must be a positive integer, got {n}")
    n = int(n)
    big = m.d * n
    if big * big > max_dim:
        raise SizeError(f"lifted superoperator of size {big * big} exceeds {max_dim}")
    eye = np.eye(n)
    t = np.einsum("aAcC,be,BE->abABceCE", m.tensor, eye, eye).reshape(big, big, big, big)
    name = f"{m.name}⊗id_{n}" if m.name else None
    return QuantumMap(_superop_from_tensor(t), name)


@dataclass(frozen=True)
class CpVerdict:
    """Outcome of the Choi test.

    When the map is not CP, ``witness`` is the maximally entangled projector
    (mapped out of the state space by the lifted map) and ``certificate`` the
    Choi eigenvector carrying the most negative eigenvalue.
    """

    is_cp: bool
    min_choi_eigenvalue: float
    tolerance: float
    boundary: bool = False
    hermitian: bool = True
    witness: np.ndarray | None = field(default=None, repr=False)
    certificate: np.ndarray | None = field(default=None, repr=False)


def is_completely_positive(m: QuantumMap, tol: float | None = None) -> CpVerdict:
    """Test complete positivity by the sign of the Choi spectrum.

    ``tol`` is relative to the largest Choi eigenvalue magnitude; the default
    is the package-wide state negativity tolerance. Minimum eigenvalues
    within ``±tolerance`` count as CP and are flagged ``boundary``.
    Maps whose Choi matrix is not Hermitian are never CP.
    """
    c = np.asarray(m.choi)
    hermitian = is_hermitian(c)
    vals, vecs = np.linalg.eigh(0.5 * (c + dagger(c)))
    eps = psd_tolerance(vals) if tol is None else tol * float(np.max(np.abs(vals)))
    lo = float(vals[0])
    is_cp = hermitian and lo >= -eps
    if is_cp:
        return CpVerdict(True, lo, eps, boundary=abs(lo) <= eps)
    return CpVerdict(
        False, lo, eps, hermitian=hermitian,
        witness=max_symmetric_projector(m.d) if m.d >= 2 else None,
        certificate=vecs[:, 0],
    )


def kraus_from_choi(c: Any, tol: float = KRAUS_RTOL) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of a PSD Choi matrix.

    Eigenvalues below ``tol`` times the largest are discarded, so the number
    of operators is the numerical rank. Raises :class:`NotCPError` if an
    eigenvalue is below ``-tol`` times the largest.
    """
    c = as_square(c)
    d = _dim_from_square(c.shape[0], "Choi matrix")
    vals, vecs = hermitian_eigh(c)
    cut = tol * float(np.max(np.abs(vals)))
    if vals[0] < -cut:
        raise NotCPError(vals[0])
    keep = vals > cut
    return [np.sqrt(d * lam) * vecs[:, i].reshape(d, d) for i, lam in zip(np.flatnonzero(keep), vals[keep])]


def is_trace_preserving(m: QuantumMap, tol: float = 1e-10) -> bool:
    """``Tr Λ[B] = Tr B`` on every matrix unit ``B``."""
    row = vec(np.eye(m.d)).conj() @ m.superoperator
    return bool(np.max(np.abs(row - vec(np.eye(m.d)))) <= tol)


def is_unital(m: QuantumMap, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(m.apply(np.eye(m.d)) - np.eye(m.d))) <= tol)


# -- named families -----------------------------------------------------------


def _check_dim(d: int) -> int:
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    return int(d)


def identity_map(d: int) -> QuantumMap:
    d = _check_dim(d)
    return QuantumMap(np.eye(d * d), "identity")


def _transposition_tensor(d: int) -> np.ndarray:
    eye = np.eye(d)
    return np.einsum("il,jk->ijkl", eye, eye)


def _trace_tensor(d: int) -> np.ndarray:
    eye = np.eye(d)
    return np.einsum("ij,kl->ijkl", eye, eye) / d


def transposition_map(d: int) -> QuantumMap:
    d = _check_dim(d)
    return QuantumMap(_superop_from_tensor(_transposition_tensor(d)), "transposition")


def trace_map(d: int) -> QuantumMap:
    """Completely depolarizing map ``x ↦ Tr(x) I/d``."""
    d = _check_dim(d)
    return QuantumMap(_superop_from_tensor(_trace_tensor(d)), "trace")


def pcp_family_map(d: int, mu: float) -> QuantumMap:
    """Convex mix ``μ · (trace map) + (1 - μ) · transposition``.

    Positive, unital, trace-preserving and self-dual for every ``μ`` in
    ``[0, 1]``; completely positive only from ``μ = d/(d+1)`` upwards.
    """
    d = _check_dim(d)
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0, 1], got {mu}")
    t = mu * _trace_tensor(d) + (1 - mu) * _transposition_tensor(d)
    return QuantumMap(_superop_from_tensor(t), f"pcp(mu={mu!r})")


def unitary_channel(u: Any, tol: float = 1e-10) -> QuantumMap:
    u = as_square(u)
    if np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))) > tol:
        raise DomainError("operator is not unitary")
    return QuantumMap.from_kraus([u], "unitary")


def random_cp_map(d: int, rng: np.random.Generator, n_kraus: int | None = None,
                  trace_preserving: bool = True) -> QuantumMap:
    """Random CP map from a Ginibre Kraus set, optionally normalized to be trace preserving."""
    n_kraus = d * d if n_kraus is None else n_kraus
    ops = rng.standard_normal((n_kraus, d, d)) + 1j * rng.standard_normal((n_kraus, d, d))
    if trace_preserving:
        s = np.einsum("aji,ajk->ik", ops.conj(), ops)
        vals, vecs = np.linalg.eigh(s)
        ops = ops @ ((vecs / np.sqrt(vals)) @ dagger(vecs))
    return QuantumMap.from_kraus(list(ops), "random-cp")


# -- positivity probe ---------------------------------------------------------

NOT_FALSIFIED = "not_falsified"
CERTIFIED_NOT_POSITIVE = "certified_not_positive"


@dataclass(frozen=True)
class ProbeResult:
    """Result of :func:`positivity_probe`.

    ``status`` is ``"not_falsified"`` when no negative output was found;
    that is NOT a proof of positivity.
    """

    status: str
    min_eigenvalue: float
    witness: np.ndarray | None = field(default=None, repr=False)

    @property
    def certified_not_positive(self) -> bool:
        return self.status == CERTIFIED_NOT_POSITIVE


def _min_output(m: QuantumMap, psi: np.ndarray) -> tuple[float, np.ndarray, float]:
    out = m.apply(np.outer(psi, psi.conj()))
    vals, vecs = np.linalg.eigh(0.5 * (out + dagger(out)))
    return float(vals[0]), vecs[:, 0], psd_tolerance(vals)


def positivity_probe(m: QuantumMap, samples: int = 64, seed: int = 0,
                     steps: int = 25) -> ProbeResult:
    """Search for a pure state whose image has a negative eigenvalue.

    Each random pure state is refined by projected gradient descent on the
    smallest output eigenvalue, ``ψ ← normalize(ψ - η A ψ)`` with
    ``A = Λ^#[v v†]`` for the current lowest output eigenvector ``v``.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    dual = m.dual()
    best = np.inf
    for _ in range(samples):
        psi = random_pure_state(m.d, rng)
        for _ in range(steps + 1):
            lo, v, eps = _min_output(m, psi)
            best = min(best, lo)
            if lo < -eps:
                return ProbeResult(CERTIFIED_NOT_POSITIVE, lo, np.outer(psi, psi.conj()))
            a = dagger(dual.apply(np.outer(v, v.conj())))
            a = 0.5 * (a + dagger(a))
            norm = float(np.max(np.abs(np.linalg.eigvalsh(a))))
            if norm == 0.0:
                break
            psi = psi - (0.5 / norm) * (a @ psi)
            psi = psi / np.linalg.norm(psi)
    return ProbeResult(NOT_FALSIFIED, float(best))


# -- map file format ----------------------------------------------------------
# {"d": n, "representation": "superoperator" | "choi", "matrix": <matrix>}
# {"d": n, "representation": "kraus", "operators": [<matrix>, ...]}

REPRESENTATIONS = ("superoperator", "kraus", "choi")


def map_to_dict(m: QuantumMap, representation: str = "superoperator") -> dict:
    if representation == "superoperator":
        return {"d": m.d, "representation": "superoperator", "matrix": matrix_to_dict(m.superoperator)}
    if representation == "choi":
        return {"d": m.d, "representation": "choi", "matrix": matrix_to_dict(m.choi)}
    if representation == "kraus":
        return {"d": m.d, "representation": "kraus",
                "operators": [matrix_to_dict(k) for k in m.kraus()]}
    raise ValueError(f"unknown representation {representation!r}")


def map_from_dict(obj: dict) -> QuantumMap:
    try:
        d = int(obj["d"])
        rep = obj["representation"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed map object: {exc}") from exc
    if rep == "kraus":
        m = QuantumMap.from_kraus([matrix_from_dict(k) for k in obj["operators"]])
    elif rep == "superoperator":
        m = QuantumMap.from_superoperator(matrix_from_dict(obj["matrix"]))
    elif rep == "choi":
        m = QuantumMap.from_choi(matrix_from_dict(obj["matrix"]))
    else:
        raise ValueError(f"unknown representation {rep!r}")
    if m.d != d:
        raise ShapeError(f"map payload has dimension {m.d}, header says {d}")
    return m


def dumps_map(m: QuantumMap, representation: str = "superoperator") -> str:
    return json.dumps(map_to_dict(m, representation))


def loads_map(text: str) -> QuantumMap:
    return map_from_dict(json.loads(text))
