import json
import math

import numpy as np
import pytest

from cpmaps import compat
from cpmaps.compat import (
    compat_scan,
    cp_threshold,
    f_comp,
    f_comp_bisection,
    is_compatible,
    lifted_isotropic_image,
    lifted_isotropic_spectrum,
    v_comp,
)
from cpmaps.errors import DomainError, ShapeError, SizeError
from cpmaps.maps import (
    is_completely_positive,
    lift,
    pcp_family_map,
    trace_map,
    transposition_map,
)
from cpmaps.operators import hermitian_eigenvalues
from cpmaps.states import (
    isotropic_state,
    max_symmetric_projector,
    random_density,
    separable_mixture,
)


def numeric_spectrum(d, mu, F):
    """Independent route: build the lifted superoperator and diagonalize its image."""
    return hermitian_eigenvalues(lift(pcp_family_map(d, mu), d).apply(isotropic_state(d, F))).eigenvalues


def test_lifted_spectrum_examples():
    for d in (2, 3, 5):
        for F in (0.0, 0.3, 1.0):
            assert lifted_isotropic_spectrum(d, 1.0, F).e_minus == pytest.approx(1 / d**2, abs=1e-15)
    assert lifted_isotropic_spectrum(2, 0.0, 1.0).e_minus == pytest.approx(-0.5)
    # d=3, μ=F=1/2: frozen from numerical diagonalization of the 81x81 lifted image
    vals = numeric_spectrum(3, 0.5, 0.5)
    assert vals[0] == pytest.approx(0.013888888888888888, abs=1e-14)
    assert lifted_isotropic_spectrum(3, 0.5, 0.5).e_minus == pytest.approx(1 / 72, abs=1e-15)


def test_lifted_spectrum_unit_trace():
    for d in range(2, 8):
        for mu in np.linspace(0, 1, 7):
            for F in np.linspace(0, 1, 7):
                s = lifted_isotropic_spectrum(d, mu, F)
                assert s.mult_plus * s.e_plus + s.mult_minus * s.e_minus == pytest.approx(1, abs=1e-14)


def test_trace_map_endpoint_spectrum():
    for d in (2, 3, 6):
        s = lifted_isotropic_spectrum(d, 1.0, 0.8)
        assert s.e_plus == pytest.approx(1 / d**2, abs=1e-15)


def test_lifted_spectrum_multiplicities():
    s = lifted_isotropic_spectrum(4, 0.2, 0.6)
    assert (s.mult_plus, s.mult_minus) == (10, 6)
    assert len(s.eigenvalues()) == 16


def test_closed_form_matches_numeric_grid():
    for d in range(2, 7):
        for mu in np.linspace(0, 1, 11):
            for F in np.linspace(0, 1, 11):
                s = lifted_isotropic_spectrum(d, mu, F)
                vals = hermitian_eigenvalues(lifted_isotropic_image(d, mu, F)).eigenvalues
                assert np.max(np.abs(vals - s.eigenvalues())) < 1e-10
                assert s.e_plus >= 0


def test_two_routes_for_the_lifted_image_agree():
    for d in (2, 3):
        for mu, F in ((0.0, 1.0), (0.4, 0.7)):
            a = lifted_isotropic_image(d, mu, F)
            b = lift(pcp_family_map(d, mu), d).apply(isotropic_state(d, F))
            assert np.max(np.abs(a - b)) < 1e-14


def test_lifted_spectrum_domain():
    with pytest.raises(DomainError):
        lifted_isotropic_spectrum(1, 0.5, 0.5)
    with pytest.raises(DomainError):
        lifted_isotropic_spectrum(2, 1.1, 0.5)
    with pytest.raises(DomainError):
        lifted_isotropic_spectrum(2, 0.5, -0.1)


def test_f_comp_examples():
    assert f_comp_bisection(2, 0.5) == pytest.approx(0.75, abs=1e-9)
    assert f_comp(2, 0.5) == pytest.approx(0.75, abs=1e-15)
    assert f_comp(2, 0.0) == 0.5
    for d in range(2, 9):
        assert f_comp(d, d / (d + 1)) == pytest.approx(1.0, abs=1e-15)
        assert f_comp(d, 1.0) == 1.0
        assert compat.all_compatible(d, 1.0)
        assert compat.f_comp_formula(d, 1.0) == math.inf


def test_f_comp_agrees_with_bisection():
    for d in range(2, 7):
        for mu in (0.0, 0.15, 0.35, 0.55, d / (d + 1) - 0.01):
            assert abs(f_comp_bisection(d, mu) - f_comp(d, mu)) < 1e-8


def test_f_comp_clamped_above_threshold():
    for d in (2, 3, 4):
        for mu in (d / (d + 1) + 0.01, 0.95):
            assert f_comp(d, mu) == 1.0
            assert f_comp_bisection(d, mu) == 1.0


def test_f_comp_lower_bound():
    for d in range(2, 10):
        assert f_comp(d, 0.0) == 1 / d
        for mu in np.linspace(0.01, 1, 40):
            assert f_comp(d, mu) > 1 / d


def test_v_comp_examples():
    assert v_comp(2, 0.5) == pytest.approx(f_comp_bisection(2, 0.5) - 0.5, abs=1e-9)
    assert v_comp(2, 0.5) == pytest.approx(0.25, abs=1e-15)
    for d in range(2, 20):
        assert v_comp(d, 0.0) == 0.0
    assert 64 * v_comp(64, 0.5) == pytest.approx(63 / 64, abs=1e-14)
    assert abs(64 * v_comp(64, 0.5) - 1) < 0.02


def test_v_comp_cap_and_domain():
    for d in (2, 3, 7):
        assert v_comp(d, 0.99) == pytest.approx(1 - 1 / d)
        assert v_comp(d, cp_threshold(d)) == pytest.approx(1 - 1 / d)
        assert v_comp(d, 1.0) == pytest.approx(1 - 1 / d)
        for mu in np.linspace(0, 1, 23):
            assert v_comp(d, mu) == pytest.approx(max(0.0, min(f_comp(d, mu), 1) - 1 / d), abs=1e-15)
    with pytest.raises(DomainError):
        v_comp(2, -0.1)
    with pytest.raises(DomainError):
        v_comp(1, 0.3)


def test_v_comp_scaling_law():
    mu = 0.5
    prev_v, prev_dv = math.inf, -math.inf
    for d in range(2, 200):
        v = v_comp(d, mu)
        dv = d * v
        assert math.isclose(dv, mu * (d - 1) / (d * (1 - mu)), rel_tol=1e-15)
        assert v < prev_v
        assert prev_dv < dv < mu / (1 - mu)
        prev_v, prev_dv = v, dv


def test_v_comp_from_grid_measurement():
    # fraction of compatible F on a fine grid of the entangled interval
    for d in (2, 3, 4):
        for mu in (0.2, 0.5):
            grid = np.linspace(1 / d, 1, 801)[1:]
            step = grid[1] - grid[0]
            ok = [is_compatible(pcp_family_map(d, mu), isotropic_state(d, F), d).compatible for F in grid]
            measured = np.sum(ok) * step
            assert abs(measured - v_comp(d, mu)) <= 1.01 * step


def test_cp_threshold_examples():
    assert cp_threshold(2) == pytest.approx(2 / 3)
    assert cp_threshold(3) == 0.75
    for d in range(2, 7):
        thr = cp_threshold(d)
        assert not is_completely_positive(pcp_family_map(d, thr - 1e-3)).is_cp
        assert is_completely_positive(pcp_family_map(d, thr + 1e-3)).is_cp
        assert is_completely_positive(pcp_family_map(d, thr)).is_cp


def test_choi_spectrum_closed_form():
    for d in (2, 4):
        for mu in (0.0, 0.5, 1.0):
            hi, lo = compat.choi_spectrum(d, mu)
            vals = hermitian_eigenvalues(pcp_family_map(d, mu).choi).eigenvalues
            assert np.allclose(vals, np.sort(np.r_[np.full(d * (d - 1) // 2, lo), np.full(d * (d + 1) // 2, hi)]))


def test_is_compatible_examples(rng):
    for d in (2, 3, 4):
        res = is_compatible(transposition_map(d), max_symmetric_projector(d), d)
        assert not res.compatible
        assert res.min_eigenvalue == pytest.approx(-1 / d)
    for trial in range(10):
        w = rng.dirichlet(np.ones(3))
        a = [random_density(3, 30 * trial + j) for j in range(3)]
        b = [random_density(3, 30 * trial + 10 + j) for j in range(3)]
        assert is_compatible(transposition_map(3), separable_mixture(w, a, b), 3).compatible
    with pytest.raises(ShapeError):
        is_compatible(transposition_map(2), np.eye(6) / 6, 2)


def test_is_compatible_flip_at_f_comp():
    d, mu = 2, 0.5
    m = pcp_family_map(d, mu)
    fc = f_comp(d, mu)
    assert is_compatible(m, isotropic_state(d, fc - 1e-6), d).compatible
    assert not is_compatible(m, isotropic_state(d, fc + 1e-6), d).compatible
    grid = np.linspace(0, 1, 201)
    verdicts = [is_compatible(m, isotropic_state(d, F), d).compatible for F in grid]
    assert verdicts == [bool(F <= fc) for F in grid]


def test_is_compatible_other_lift_dim():
    rho = random_density(6, 4)
    assert is_compatible(trace_map(2), rho, 3).compatible
    assert is_compatible(transposition_map(2), np.kron(random_density(2, 1), random_density(3, 2)), 3).compatible


def test_trace_map_endpoint_accepts_everything():
    for d in (2, 3):
        for seed in range(20):
            assert is_compatible(pcp_family_map(d, 1.0), random_density(d * d, seed), d).compatible
        assert is_compatible(pcp_family_map(d, 1.0), max_symmetric_projector(d), d).compatible


def test_scan_examples():
    [r] = compat_scan([2], [0.5])
    assert r.f_comp == pytest.approx(0.75) and r.v_comp == pytest.approx(0.25)
    assert not r.is_cp and r.cp_threshold_mu == pytest.approx(2 / 3)
    assert all(r.v_comp == 0 for r in compat_scan(range(2, 9), [0.0]))
    vs = [r.v_comp for r in compat_scan(range(2, 33), [0.5])]
    assert all(b < a for a, b in zip(vs, vs[1:]))


def test_scan_order_and_verification():
    ds, mus = [2, 3, 4], [0.0, 0.3, 0.9]
    reports = compat_scan(ds, mus, verify=True)
    assert [(r.d, r.mu) for r in reports] == [(d, mu) for d in ds for mu in mus]
    for r in reports:
        assert r.abs_diff < 1e-8
        assert r.is_cp_numeric == r.is_cp
    parallel = compat_scan(ds, mus, verify=True, max_workers=4)
    assert parallel == reports


def test_scan_errors():
    with pytest.raises(DomainError):
        compat_scan([], [0.5])
    with pytest.raises(SizeError):
        compat_scan([9], [0.5], verify=True)
    with pytest.raises(DomainError):
        compat_scan([2], [1.5])


def test_scan_csv_format():
    text = compat.scan_to_csv(compat_scan([2, 3], [0.5, 0.8], verify=True))
    lines = text.splitlines()
    assert lines[0] == "d,mu,cp_threshold,is_cp,f_comp,v_comp,f_comp_numeric,abs_diff"
    assert lines[1].startswith("2,0.5,0.66666666666666663,false,0.75,0.25,")
    rows = compat.scan_from_csv(text)
    exact = compat_scan([2, 3], [0.5, 0.8])
    for row, r in zip(rows, exact):
        assert row["f_comp"] == r.f_comp and row["v_comp"] == r.v_comp
        assert row["cp_threshold"] == r.cp_threshold_mu
    unverified = compat.scan_to_csv(exact).splitlines()[1]
    assert unverified.endswith(",,")


def test_scan_json_round_trip():
    reports = compat_scan([2, 5], [0.1, 0.7], verify=True)
    back = json.loads(compat.scan_to_json(reports))
    assert [compat.CompatReport(**obj) for obj in back] == reports
