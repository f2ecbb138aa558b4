import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from holonomy_lab.algebra import (
    DEGENERATE,
    IDENTITY,
    eig_hermitian_2x2,
    eig_unitary_2x2,
    expm_i_hermitian,
    pauli,
    pauli_coefficients,
)
from holonomy_lab.bloch import projectors_from_bloch
from holonomy_lab.errors import NonHermitianInput, NonUnitaryInput
from holonomy_lab.models import ParametricModel, operator_at


def taylor_expm(A, terms=20):
    """Truncated power series of exp(A), independent of the closed form."""
    out = np.zeros((2, 2), dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(terms):
        out += term
        term = term @ A / (k + 1)
    return out


def test_pauli_z_is_diagonal():
    np.testing.assert_array_equal(pauli("z"), np.diag([1, -1]))


@pytest.mark.parametrize("axis", "xyz")
def test_pauli_involution_hermitian_traceless(axis):
    s = pauli(axis)
    np.testing.assert_allclose(s @ s, IDENTITY)
    np.testing.assert_allclose(s, s.conj().T)
    assert np.trace(s) == 0


def test_pauli_product():
    np.testing.assert_allclose(pauli("x") @ pauli("y"), 1j * pauli("z"))


def test_pauli_bad_axis():
    with pytest.raises(ValueError):
        pauli("w")


def test_expm_of_zero_is_identity():
    np.testing.assert_allclose(expm_i_hermitian(np.zeros((2, 2)), 1.0), IDENTITY, atol=0)


def test_expm_diagonal():
    U = expm_i_hermitian(pauli("z"), math.pi / 2)
    np.testing.assert_allclose(U, np.diag([np.exp(-1j * math.pi / 2), np.exp(1j * math.pi / 2)]), atol=1e-15)


def test_expm_matches_taylor_oracle(rng):
    for _ in range(50):
        H = random_hermitian(rng)
        U = expm_i_hermitian(H, 0.37)
        np.testing.assert_allclose(U, taylor_expm(-1j * 0.37 * H), atol=1e-10)
        assert np.max(np.abs(U.conj().T @ U - IDENTITY)) <= 1e-12


def test_expm_group_law(rng):
    for _ in range(100):
        H = random_hermitian(rng)
        s, t = rng.uniform(-10, 10, size=2)
        np.testing.assert_allclose(
            expm_i_hermitian(H, s) @ expm_i_hermitian(H, t), expm_i_hermitian(H, s + t), atol=1e-10
        )


def test_expm_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        expm_i_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


def test_eig_hermitian_half_sigma_y():
    E1, E2, a = eig_hermitian_2x2(0.5 * pauli("y"))
    assert (E1, E2) == pytest.approx((0.5, -0.5), abs=1e-15)
    np.testing.assert_allclose(a, [0, 1, 0], atol=1e-15)


def test_eig_hermitian_zero_is_degenerate():
    assert eig_hermitian_2x2(np.zeros((2, 2)))[2] is DEGENERATE


def test_eig_hermitian_matches_quadratic_formula(rng):
    for _ in range(200):
        H = random_hermitian(rng, scale=rng.uniform(0.01, 10))
        tr = np.trace(H).real
        det = np.linalg.det(H).real
        disc = math.sqrt(max(tr * tr - 4 * det, 0.0))
        E1, E2, _ = eig_hermitian_2x2(H)
        assert E1 == pytest.approx(0.5 * (tr + disc), abs=1e-12)
        assert E2 == pytest.approx(0.5 * (tr - disc), abs=1e-12)


@settings(max_examples=200, derandomize=True)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_eig_hermitian_invariants(seed):
    H = random_hermitian(np.random.default_rng(seed), scale=3.0)
    E1, E2, a = eig_hermitian_2x2(H)
    P1, P2 = projectors_from_bloch(a)
    assert E1 >= E2
    np.testing.assert_allclose(E1 * P1 + E2 * P2, H, atol=1e-11)
    assert E1 + E2 == pytest.approx(np.trace(H).real, abs=1e-11)
    assert E1 * E2 == pytest.approx(np.linalg.det(H).real, abs=1e-11)
    np.testing.assert_allclose(P1 @ P1, P1, atol=1e-12)
    np.testing.assert_allclose(P1 @ P2, 0, atol=1e-12)
    np.testing.assert_array_equal(P1 + P2, IDENTITY)
    assert np.trace(P1).real == pytest.approx(1.0, abs=1e-12)


def test_eig_unitary_identity_degenerate():
    assert eig_unitary_2x2(IDENTITY)[2] is DEGENERATE


def test_eig_unitary_diagonal():
    th1, th2, a = eig_unitary_2x2(expm_i_hermitian(pauli("z"), 1.0))
    assert (th1, th2) == pytest.approx((-1.0, 1.0), abs=1e-14)
    np.testing.assert_allclose(a, [0, 0, 1], atol=1e-14)


def test_eig_unitary_kicked_map_at_pi():
    _, _, a = eig_unitary_2x2(operator_at(ParametricModel.floquet_map(), math.pi))
    # collinear with cos(pi/2) e_y - sin(pi/2) e_z = -e_z
    assert abs(a @ np.array([0.0, 0.0, -1.0])) == pytest.approx(1.0, abs=1e-12)


def test_eig_unitary_reconstruction(rng):
    for _ in range(200):
        H = random_hermitian(rng, scale=3.0)
        phase = np.exp(1j * rng.uniform(-np.pi, np.pi))
        U = phase * expm_i_hermitian(H, 1.0)
        th1, th2, a = eig_unitary_2x2(U)
        P1, P2 = projectors_from_bloch(a)
        np.testing.assert_allclose(np.exp(1j * th1) * P1 + np.exp(1j * th2) * P2, U, atol=1e-10)
        assert -np.pi < th1 <= th2 <= np.pi


def test_eig_unitary_rejects_non_unitary():
    with pytest.raises(NonUnitaryInput):
        eig_unitary_2x2(2 * IDENTITY)


def test_pauli_coefficients_round_trip(rng):
    H = random_hermitian(rng)
    c, h = pauli_coefficients(H)
    np.testing.assert_allclose(c * IDENTITY + np.tensordot(h, np.stack([pauli(k) for k in "xyz"]), 1), H)
