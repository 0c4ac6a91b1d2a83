import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cpmaps.errors import NonHermitianError, ShapeError, SizeError
from cpmaps.operators import (
    SIGMA_X,
    SIGMA_Z,
    dumps_matrix,
    hermitian_eigenvalues,
    hermitian_eigh,
    kron,
    loads_matrix,
    matrix_exp,
    matrix_from_dict,
    partial_trace,
    partial_transpose,
    random_hermitian,
    random_unitary,
)
from cpmaps.states import flip_operator, max_symmetric_projector, random_density


def test_kron_identity_and_diagonal():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))


def test_kron_pauli_spectrum():
    m = kron(SIGMA_X, SIGMA_X)
    # independent oracle: general eigensolver on the 4x4
    vals = np.sort(np.linalg.eigvals(m).real)
    assert np.allclose(vals, [-1, -1, 1, 1])
    assert np.allclose(hermitian_eigenvalues(m).eigenvalues, [-1, -1, 1, 1])


def test_kron_size_limit():
    with pytest.raises(SizeError):
        kron(np.eye(100), np.eye(100))
    with pytest.raises(SizeError):
        kron(np.eye(4), np.eye(4), max_dim=8)


int_mats = arrays(np.int64, (2, 2), elements=st.integers(-5, 5))


@given(int_mats, int_mats, int_mats)
def test_kron_associative_exactly(a, b, c):
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_eigenvalues_basic():
    assert np.allclose(hermitian_eigenvalues(np.eye(3)).eigenvalues, [1, 1, 1])
    hs = hermitian_eigenvalues(SIGMA_Z)
    assert list(hs.eigenvalues) == [-1, 1]
    assert hs.hermiticity_defect == 0
    assert np.allclose(hermitian_eigenvalues(flip_operator(2)).eigenvalues, [-1, 1, 1, 1])


def test_eigenvalues_errors():
    with pytest.raises(ShapeError):
        hermitian_eigenvalues(np.ones((2, 3)))
    with pytest.raises(NonHermitianError) as info:
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    assert info.value.defect == pytest.approx(1.0)


def test_eigenvalues_unitary_invariance(rng):
    for d in (2, 5, 9):
        a = random_hermitian(d, rng)
        q = random_unitary(d, rng)
        v1 = hermitian_eigenvalues(a).eigenvalues
        v2 = hermitian_eigenvalues(q @ a @ q.conj().T, tol=1e-9).eigenvalues
        assert np.max(np.abs(v1 - v2)) < 1e-9


def test_eigh_reconstruction(rng):
    a = random_hermitian(7, rng)
    vals, vecs = hermitian_eigh(a)
    resid = np.linalg.norm(a - (vecs * vals) @ vecs.conj().T)
    assert resid <= 10 * 1e-9 * np.linalg.norm(a)


def test_matrix_exp_examples():
    assert np.array_equal(matrix_exp(np.zeros((3, 3))), np.eye(3))
    u = matrix_exp(-1j * np.pi * SIGMA_Z / 2)
    assert np.allclose(u, np.diag([-1j, 1j]), atol=1e-14)
    t = 0.7
    e = matrix_exp(t * np.diag([-2.0, -3.0]))
    assert e[0, 0] == pytest.approx(np.exp(-2 * t), rel=1e-14)
    assert e[1, 1] == pytest.approx(np.exp(-3 * t), rel=1e-14)
    assert abs(e[0, 1]) == 0


def test_matrix_exp_general_path_ode_residual(rng):
    # non-normal input goes through scaling-and-squaring; check d/dt e^{tA} = A e^{tA} by central differences
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    a = 0.3 * a
    h = 1e-5
    deriv = (matrix_exp((1 + h) * a) - matrix_exp((1 - h) * a)) / (2 * h)
    e = matrix_exp(a)
    assert np.linalg.norm(deriv - a @ e) / np.linalg.norm(a @ e) < 1e-8
    assert np.linalg.norm(e @ matrix_exp(-a) - np.eye(5)) < 1e-12


def test_matrix_exp_spectral_paths_agree_with_taylor(rng):
    h = random_hermitian(4, rng) * 0.2
    taylor = sum(np.linalg.matrix_power(h, k) / math.factorial(k) for k in range(30))
    assert np.allclose(matrix_exp(h), taylor, atol=1e-13)
    u = matrix_exp(1j * h)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-13)


def test_matrix_exp_commuting_sum():
    a = np.diag([0.3, -1.2, 0.5])
    b = np.diag([-0.7, 0.1, 2.0])
    assert np.max(np.abs(matrix_exp(a + b) - matrix_exp(a) @ matrix_exp(b))) < 1e-9


def test_partial_transpose_examples():
    assert np.array_equal(partial_transpose(np.eye(4), 2, 2, "A"), np.eye(4))
    pt = partial_transpose(max_symmetric_projector(2), 2, 2, "A")
    assert np.allclose(pt, flip_operator(2) / 2)
    assert hermitian_eigenvalues(pt).min == pytest.approx(-0.5)


def test_partial_transpose_involution_and_trace(rng):
    m = random_hermitian(9, rng)
    for sub in "AB":
        once = partial_transpose(m, 3, 3, sub)
        assert np.array_equal(partial_transpose(once, 3, 3, sub), m)
        assert np.trace(once) == pytest.approx(np.trace(m))
        assert np.sum(hermitian_eigenvalues(once).eigenvalues) == pytest.approx(np.trace(m).real)
    # A and B transposes compose to the full transpose
    assert np.allclose(partial_transpose(partial_transpose(m, 3, 3, "A"), 3, 3, "B"), m.T)


def test_partial_transpose_elementwise_oracle(rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    d_a, d_b = 2, 3
    expected = np.zeros_like(m)
    for ia in range(d_a):
        for ib in range(d_b):
            for ja in range(d_a):
                for jb in range(d_b):
                    expected[ia * d_b + ib, ja * d_b + jb] = m[ja * d_b + ib, ia * d_b + jb]
    assert np.array_equal(partial_transpose(m, d_a, d_b, "A"), expected)


def test_partial_transpose_shape_error():
    with pytest.raises(ShapeError):
        partial_transpose(np.eye(6), 2, 2)


def test_partial_trace_examples(rng):
    for d in (2, 3, 4):
        p = max_symmetric_projector(d)
        assert np.allclose(partial_trace(p, d, d, "A"), np.eye(d) / d)
        assert np.allclose(partial_trace(p, d, d, "B"), np.eye(d) / d)
    rho = random_density(2, 1)
    sigma = 2.5 * random_density(3, 2)
    assert np.allclose(partial_trace(np.kron(rho, sigma), 2, 3, "A"), rho * np.trace(sigma))
    assert np.allclose(partial_trace(np.kron(rho, sigma), 2, 3, "B"), sigma * np.trace(rho))


def test_partial_trace_preserves_trace_summation_oracle(rng):
    m = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    direct = sum(m[i, i] for i in range(12))
    for keep in "AB":
        assert np.trace(partial_trace(m, 4, 3, keep)) == pytest.approx(direct, abs=1e-12)
    with pytest.raises(ShapeError):
        partial_trace(m, 5, 3)


def test_matrix_json_exact_round_trip(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    m[0, 0] = 0.1 + 1e-300j
    back = loads_matrix(dumps_matrix(m))
    assert np.array_equal(back, m)
    obj = json.loads(dumps_matrix(m))
    assert obj["rows"] == 3 and obj["cols"] == 3 and len(obj["data"]) == 9
    assert obj["data"][1] == [m[0, 1].real, m[0, 1].imag]


@settings(max_examples=50)
@given(arrays(np.float64, (2, 3, 2), elements=st.floats(-1e300, 1e300)))
def test_matrix_json_round_trip_property(parts):
    m = parts[..., 0] + 1j * parts[..., 1]
    assert np.array_equal(loads_matrix(dumps_matrix(m)), m)


def test_matrix_from_dict_rejects_bad_input():
    with pytest.raises(ShapeError):
        matrix_from_dict({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ValueError):
        matrix_from_dict({"rows": 1, "cols": 1})
