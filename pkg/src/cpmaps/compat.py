"""Compatibility of isotropic states with the positive, non-CP family ``Λ_μ``.

``Λ_μ = μ·(trace map) + (1-μ)·T`` on ``M_d`` is positive for all ``μ`` in
``[0, 1]`` and CP only for ``μ >= d/(d+1)``. A bipartite state is
compatible with ``Λ_μ`` when ``(Λ_μ ⊗ id_d)[ρ]`` is still a state. On the
isotropic family ``ρ_F`` the lifted image is ``αI + βV`` with ``V`` the
flip operator, so it has two eigenvalues

    E+ = (d + d²F + μ(1 - d²F)) / (d²(d + 1)),
    E- = (d - d²F + μ(d²F - 1)) / (d²(d - 1)),

with multiplicities ``d(d+1)/2`` and ``d(d-1)/2``; they sum to unit trace.
``E_-`` changes sign at

    F_comp(μ) = (d - μ) / (d²(1 - μ)),

so the entangled compatible states form the interval ``(1/d, F_comp]`` of
length ``V_comp = μ(d-1)/(d²(1-μ))``, which shrinks like ``1/d``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ShapeError, SizeError
from .maps import QuantumMap, apply_lifted, is_completely_positive, pcp_family_map
from .operators import hermitian_eigenvalues
from .states import isotropic_state, psd_tolerance

VERIFY_MAX_D = 8
BISECTION_WIDTH = 1e-10


def _check_d(d: int) -> int:
    if int(d) != d or d < 2:
        raise DomainError(f"d must be an integer >= 2, got {d}")
    return int(d)


def _check_unit(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")
    return x


def cp_threshold(d: int) -> float:
    """Smallest ``μ`` for which ``Λ_μ`` is completely positive, ``d/(d+1)``."""
    d = _check_d(d)
    return d / (d + 1)


def choi_spectrum(d: int, mu: float) -> tuple[float, float]:
    """Closed-form Choi eigenvalues of ``Λ_μ``.

    Returns ``((d - μ(d-1))/d², (μ(1+d) - d)/d²)`` with multiplicities
    ``d(d+1)/2`` and ``d(d-1)/2``.
    """
    d = _check_d(d)
    mu = _check_unit("mu", mu)
    return (d - mu * (d - 1)) / d**2, (mu * (1 + d) - d) / d**2


class LiftedSpectrum(NamedTuple):
    e_plus: float
    e_minus: float
    mult_plus: int
    mult_minus: int

    def eigenvalues(self) -> np.ndarray:
        """All ``d⁴`` eigenvalues, ascending."""
        return np.sort(np.concatenate([np.full(self.mult_minus, self.e_minus),
                                       np.full(self.mult_plus, self.e_plus)]))


def lifted_isotropic_spectrum(d: int, mu: float, F: float) -> LiftedSpectrum:
    """Eigenvalues of ``(Λ_μ ⊗ id_d)[ρ_F]`` in closed form."""
    d = _check_d(d)
    mu = _check_unit("mu", mu)
    F = _check_unit("F", F)
    d2 = d * d
    e_plus = (d + d2 * F + mu * (1 - d2 * F)) / (d2 * (d + 1))
    e_minus = (d - d2 * F + mu * (d2 * F - 1)) / (d2 * (d - 1))
    return LiftedSpectrum(e_plus, e_minus, d * (d + 1) // 2, d * (d - 1) // 2)


def lifted_isotropic_image(d: int, mu: float, F: float) -> np.ndarray:
    """``(Λ_μ ⊗ id_d)[ρ_F]`` built numerically from the map and the state."""
    return apply_lifted(pcp_family_map(d, mu), isotropic_state(d, F), d)


def numeric_min_eigenvalue(d: int, mu: float, F: float) -> float:
    return hermitian_eigenvalues(lifted_isotropic_image(d, mu, F)).min


def f_comp_formula(d: int, mu: float) -> float:
    """Unclamped ``(d - μ)/(d²(1 - μ))``; ``inf`` at ``μ = 1``."""
    d = _check_d(d)
    mu = _check_unit("mu", mu)
    if mu == 1.0:
        return math.inf
    return (d - mu) / (d * d * (1 - mu))


def f_comp(d: int, mu: float) -> float:
    """Largest ``F`` whose isotropic state stays compatible with ``Λ_μ``.

    Clamped to 1 where every isotropic state is compatible (from the CP
    threshold upwards, including the singular point ``μ = 1``).
    """
    return min(f_comp_formula(d, mu), 1.0)


def all_compatible(d: int, mu: float) -> bool:
    return f_comp_formula(d, mu) >= 1.0


def v_comp(d: int, mu: float) -> float:
    """Length of the interval of entangled, ``Λ_μ``-compatible isotropic states.

    ``μ(d-1)/(d²(1-μ))`` below the CP threshold, capped at ``1 - 1/d`` (all
    entangled isotropic states) from the threshold up.
    """
    d = _check_d(d)
    mu = _check_unit("mu", mu)
    if mu >= cp_threshold(d):
        return 1.0 - 1.0 / d
    return mu * (d - 1) / (d * d * (1 - mu))


def f_comp_bisection(d: int, mu: float, width: float = BISECTION_WIDTH) -> float:
    """Compatibility edge found from the numerical spectrum alone.

    Bisects the sign of the smallest eigenvalue of the numerically built
    ``(Λ_μ ⊗ id_d)[ρ_F]`` over ``F`` in ``[1/d, 1]``. Does not use the
    closed forms, so it can check them.
    """
    d = _check_d(d)
    mu = _check_unit("mu", mu)

    def ok(F: float) -> bool:
        return numeric_min_eigenvalue(d, mu, F) >= 0.0

    lo, hi = 1.0 / d, 1.0
    if ok(hi):
        return 1.0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Compatibility:
    compatible: bool
    min_eigenvalue: float


def is_compatible(m: QuantumMap, rho: Any, lift_dim: int, tol: float | None = None) -> Compatibility:
    """Whether ``(m ⊗ id_n)[ρ]`` is still positive semidefinite.

    ``tol`` is an absolute negativity allowance; by default it is the
    package-wide relative tolerance applied to the image's spectrum.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != m.d * lift_dim:
        raise ShapeError(f"state must act on dimension {m.d * lift_dim}, got {rho.shape}")
    vals = hermitian_eigenvalues(apply_lifted(m, rho, lift_dim)).eigenvalues
    eps = psd_tolerance(vals) if tol is None else tol
    lo = float(vals[0])
    return Compatibility(lo >= -eps, lo)


@dataclass(frozen=True)
class CompatReport:
    """Closed-form compatibility data for one ``(d, μ)``.

    ``e_plus``/``e_minus`` are evaluated at the queried ``F``. The numeric
    fields are filled only in verification mode.
    """

    d: int
    mu: float
    F: float
    cp_threshold_mu: float
    is_cp: bool
    e_plus: float
    e_minus: float
    f_comp: float
    v_comp: float
    all_compatible: bool
    f_comp_numeric: float | None = None
    abs_diff: float | None = None
    is_cp_numeric: bool | None = None
    min_choi_eigenvalue: float | None = None


def compat_report(d: int, mu: float, F: float = 1.0, verify: bool = False,
                  verify_max_d: int = VERIFY_MAX_D) -> CompatReport:
    d = _check_d(d)
    mu = _check_unit("mu", mu)
    F = _check_unit("F", F)
    if verify and d > verify_max_d:
        raise SizeError(f"verification is capped at d <= {verify_max_d}, got d = {d}")
    lifted = lifted_isotropic_spectrum(d, mu, F)
    fc = f_comp(d, mu)
    extra: dict = {}
    if verify:
        fnum = f_comp_bisection(d, mu)
        verdict = is_completely_positive(pcp_family_map(d, mu))
        extra = dict(f_comp_numeric=fnum, abs_diff=abs(fnum - fc),
                     is_cp_numeric=verdict.is_cp, min_choi_eigenvalue=verdict.min_choi_eigenvalue)
    return CompatReport(
        d=d, mu=mu, F=F,
        cp_threshold_mu=cp_threshold(d),
        is_cp=mu >= cp_threshold(d),
        e_plus=lifted.e_plus, e_minus=lifted.e_minus,
        f_comp=fc, v_comp=v_comp(d, mu),
        all_compatible=all_compatible(d, mu),
        **extra,
    )


def compat_scan(d_list: Sequence[int], mu_list: Sequence[float], F: float = 1.0,
                verify: bool = False, verify_max_d: int = VERIFY_MAX_D,
                max_workers: int | None = None) -> list[CompatReport]:
    """One :class:`CompatReport` per ``(d, μ)``, ``d`` outer, ``μ`` inner.

    Grid points are independent; with ``max_workers > 1`` they run on a
    thread pool, and the output order is unchanged.
    """
    d_list, mu_list = list(d_list), list(mu_list)
    if not d_list or not mu_list:
        raise DomainError("d and mu lists must be nonempty")
    if verify and max(d_list) > verify_max_d:
        raise SizeError(f"verification is capped at d <= {verify_max_d}, got d = {max(d_list)}")
    grid = [(d, mu) for d in d_list for mu in mu_list]
    for d, mu in grid:
        _check_d(d)
        _check_unit("mu", mu)

    def one(point):
        return compat_report(point[0], point[1], F, verify, verify_max_d)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, grid))
    return [one(p) for p in grid]


# -- scan output --------------------------------------------------------------

CSV_FIELDS = ("d", "mu", "cp_threshold", "is_cp", "f_comp", "v_comp", "f_comp_numeric", "abs_diff")


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _row(r: CompatReport) -> dict:
    return {
        "d": r.d, "mu": r.mu, "cp_threshold": r.cp_threshold_mu, "is_cp": r.is_cp,
        "f_comp": r.f_comp, "v_comp": r.v_comp,
        "f_comp_numeric": r.f_comp_numeric, "abs_diff": r.abs_diff,
    }


def scan_to_csv(reports: Iterable[CompatReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        row = _row(r)
        writer.writerow([_fmt(row[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def scan_to_json(reports: Iterable[CompatReport]) -> str:
    # 17 significant digits round-trip doubles exactly; json emits the shortest repr of the same value
    return json.dumps([asdict(r) for r in reports], indent=1)


def scan_from_csv(text: str) -> list[dict]:
    """Parse scan CSV back into typed rows; empty cells become ``None``."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed: dict = {}
        for k, v in row.items():
            if v == "":
                parsed[k] = None
            elif k == "d":
                parsed[k] = int(v)
            elif k == "is_cp":
                parsed[k] = v == "true"
            else:
                parsed[k] = float(v)
        out.append(parsed)
    return out
