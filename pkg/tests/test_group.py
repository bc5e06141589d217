import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitgauge.group import (
    IDENTITY,
    LEVI_CIVITA,
    PAULI,
    SU_BASIS,
    adjoint,
    euler_compose,
    euler_decompose,
    exp_su2,
    from_matrix,
    haar_sample,
    quat_inv,
    quat_mul,
    quat_pow,
    to_matrix,
)


def expm_i(theta, sigma):
    return scipy.linalg.expm(1j * theta * sigma)


def test_identity_and_inverse():
    U = haar_sample(1)
    assert np.allclose(quat_mul(IDENTITY, U), U, atol=1e-15)
    assert np.allclose(quat_mul(U, quat_inv(U)), IDENTITY, atol=1e-15)


def test_square_of_quarter_turn_matches_expm():
    q = np.array([np.cos(np.pi / 4), 0, 0, np.sin(np.pi / 4)])
    expected = from_matrix(expm_i(np.pi / 2, PAULI[2]))
    assert np.allclose(quat_mul(q, q), expected, atol=1e-15)
    assert np.allclose(expected, [0, 0, 0, 1], atol=1e-15)


def test_product_matches_matrix_product():
    rng = np.random.default_rng(0)
    a, b = haar_sample(rng, size=50), haar_sample(rng, size=50)
    assert np.allclose(to_matrix(quat_mul(a, b)), to_matrix(a) @ to_matrix(b), atol=1e-14)


def test_associativity_and_unit_norm():
    rng = np.random.default_rng(1)
    a, b, c = haar_sample(rng, size=(3, 20))
    left = quat_mul(quat_mul(a, b), c)
    right = quat_mul(a, quat_mul(b, c))
    assert np.allclose(left, right, atol=1e-14)
    assert np.allclose(np.linalg.norm(left, axis=-1), 1.0, atol=1e-12)


def test_basis_constants():
    for a in range(3):
        for b in range(3):
            assert np.trace(SU_BASIS[a] @ SU_BASIS[b]) == pytest.approx(float(a == b), abs=1e-15)
            comm = SU_BASIS[a] @ SU_BASIS[b] - SU_BASIS[b] @ SU_BASIS[a]
            rhs = 1j * np.sqrt(2) * np.einsum("c,cij->ij", LEVI_CIVITA[a, b], SU_BASIS)
            assert np.allclose(comm, rhs, atol=1e-15)


def test_adjoint_identity_and_center():
    assert np.allclose(adjoint(IDENTITY), np.eye(3))
    U = haar_sample(3)
    assert np.allclose(adjoint(U), adjoint(-U))


def _adjoint_by_matrices(q):
    m = to_matrix(q)
    mi = np.linalg.inv(m)
    return np.array([[np.trace(SU_BASIS[a] @ m @ SU_BASIS[b] @ mi).real for b in range(3)] for a in range(3)])


def test_adjoint_quarter_turn_about_z():
    q = from_matrix(expm_i(np.pi / 4, PAULI[2]))
    R = _adjoint_by_matrices(q)
    assert np.allclose(adjoint(q), R, atol=1e-14)
    # rotation by pi/2 about the 3-axis
    assert np.allclose(R @ [0, 0, 1], [0, 0, 1], atol=1e-14)
    assert abs(abs(R[0, 1]) - 1) < 1e-14 and abs(R[0, 0]) < 1e-14


def test_adjoint_is_homomorphism_into_so3():
    rng = np.random.default_rng(2)
    for _ in range(100):
        a, b = haar_sample(rng), haar_sample(rng)
        Ra = adjoint(a)
        assert np.allclose(adjoint(quat_mul(a, b)), Ra @ adjoint(b), atol=1e-10)
        assert np.allclose(Ra.T @ Ra, np.eye(3), atol=1e-12)
        assert np.linalg.det(Ra) == pytest.approx(1.0, abs=1e-12)


def test_diagonal_adjoint_fixes_third_axis():
    for phi in np.linspace(0.1, 3.0, 7):
        R = adjoint([np.cos(phi), 0, 0, np.sin(phi)])
        assert np.allclose(R @ [0, 0, 1], [0, 0, 1], atol=1e-14)


def test_euler_compose_examples():
    assert np.allclose(euler_compose((0, 0, 0)), IDENTITY)
    assert np.allclose(euler_compose((0.8, 0, 0)), euler_compose((0, 0, 0.8)))
    a, b, c = np.pi / 4, np.pi / 3, np.pi / 5
    m = expm_i(a / 2, PAULI[2]) @ expm_i(b / 2, PAULI[0]) @ expm_i(c / 2, PAULI[2])
    assert np.allclose(euler_compose((a, b, c)), from_matrix(m), atol=1e-15)


def test_euler_decompose_examples():
    angles, sign = euler_decompose(IDENTITY)
    assert tuple(angles) == (0.0, 0.0, 0.0) and sign == 1
    target = (np.pi / 4, np.pi / 3, np.pi / 5)
    angles, sign = euler_decompose(euler_compose(target))
    assert sign == 1 and np.allclose(angles, target, atol=1e-12)
    # diagonal exp(i phi sz): half-angle convention gives alpha = 2 phi
    phi = 0.7
    angles, sign = euler_decompose([np.cos(phi), 0, 0, np.sin(phi)])
    assert np.allclose(angles, (2 * phi, 0, 0), atol=1e-14) and sign == 1


def test_beta_pi_convention():
    q = euler_compose((1.0, np.pi, 0.4))
    angles, sign = euler_decompose(q)
    assert angles.beta == pytest.approx(np.pi) and angles.theta == 0.0
    assert np.allclose(sign * euler_compose(angles), q, atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_decompose_round_trip(v):
    q = np.array(v) / np.linalg.norm(v)
    angles, sign = euler_decompose(q)
    assert 0 <= angles.alpha < 2 * np.pi and 0 <= angles.theta < 2 * np.pi
    assert 0 <= angles.beta <= np.pi
    assert np.allclose(euler_compose(angles), sign * q, atol=1e-12)


def test_exp_and_pow():
    v = np.array([0.3, -0.2, 0.5])
    m = scipy.linalg.expm(1j * np.einsum("a,aij->ij", v, SU_BASIS))
    assert np.allclose(exp_su2(v), from_matrix(m), atol=1e-14)
    assert np.allclose(quat_pow(exp_su2(v), 0.5), exp_su2(0.5 * v), atol=1e-14)


def test_haar_determinism_and_moments():
    assert np.array_equal(haar_sample(42), haar_sample(42))
    assert not np.array_equal(haar_sample(42), haar_sample(43))
    n = 100_000
    q = haar_sample(7, size=n)
    # E[q0] = 0, Var[q0] = 1/4
    assert abs(q[:, 0].mean()) < 4 * np.sqrt(0.25 / n)
    x = (2 * q[:, 0]) ** 2 / 4
    assert abs(x.mean() - 0.25) < 4 * x.std() / np.sqrt(n)
