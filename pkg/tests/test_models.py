import math

import numpy as np
import pytest

from holonomy_lab import lift
from holonomy_lab.algebra import DEGENERATE, eig_hermitian_2x2, eig_unitary_2x2, is_unitary, pauli
from holonomy_lab.bloch import covering_projection, hamiltonian_from_spectrum
from holonomy_lab.errors import DegeneracyOnPath
from holonomy_lab.models import (
    ParametricModel,
    analytic_bloch_crossing,
    analytic_bloch_floquet,
    branch_bloch,
    director_path,
    energies_crossing,
    operator_at,
    spectrum,
)

ALL = [ParametricModel.floquet_map(), ParametricModel.crossing(), ParametricModel.perturbed(0.1)]


def test_crossing_operator_values():
    np.testing.assert_allclose(operator_at(ParametricModel.crossing(), 0.0), 0.5 * pauli("y"), atol=1e-16)
    np.testing.assert_allclose(operator_at(ParametricModel.crossing(), math.pi), 0.0, atol=1e-16)
    np.testing.assert_allclose(operator_at(ParametricModel.perturbed(0.1), math.pi), 0.05 * pauli("x"), atol=1e-16)


def test_floquet_operator_is_unitary(rng):
    m = ParametricModel.floquet_map()
    for lam in rng.uniform(-10, 10, 50):
        assert is_unitary(operator_at(m, lam), 1e-12)


@pytest.mark.parametrize("model", ALL, ids=lambda m: m.kind)
def test_operator_periodicity(model, rng):
    for lam in rng.uniform(-2 * np.pi, 2 * np.pi, 100):
        np.testing.assert_allclose(operator_at(model, lam + 2 * np.pi), operator_at(model, lam), atol=1e-12)


def test_analytic_crossing_examples():
    np.testing.assert_allclose(analytic_bloch_crossing(0.0), [0, 1, 0], atol=1e-16)
    np.testing.assert_allclose(analytic_bloch_crossing(math.pi), [0, 0, 1], atol=1e-16)
    np.testing.assert_allclose(analytic_bloch_crossing(2 * math.pi), [0, -1, 0], atol=1e-15)


def test_energies_crossing_examples():
    assert energies_crossing(0.0) == pytest.approx((0.5, -0.5))
    assert energies_crossing(math.pi) == pytest.approx((0.0, 0.0), abs=1e-16)
    assert energies_crossing(2 * math.pi) == pytest.approx((-0.5, 0.5))


def test_analytic_floquet_examples():
    np.testing.assert_allclose(analytic_bloch_floquet(0.0), [0, 1, 0], atol=1e-16)
    np.testing.assert_allclose(analytic_bloch_floquet(2 * math.pi), [0, -1, 0], atol=1e-15)
    _, _, a = eig_unitary_2x2(operator_at(ParametricModel.floquet_map(), math.pi))
    assert abs(a @ analytic_bloch_floquet(math.pi)) == pytest.approx(1.0, abs=1e-12)


def test_analytic_antiperiodicity(rng):
    lam = rng.uniform(-10, 10, 200)
    for f in (analytic_bloch_crossing, analytic_bloch_floquet):
        np.testing.assert_allclose(f(lam + 2 * np.pi), -f(lam), atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(f(lam), axis=1), 1.0, atol=1e-15)


def test_analytic_crossing_matches_eigensolver():
    m = ParametricModel.crossing()
    for lam in np.linspace(0, 2 * np.pi, 1001):
        if abs(lam - np.pi) < 1e-3:
            continue
        _, _, a = eig_hermitian_2x2(operator_at(m, lam))
        assert covering_projection(a).distance(covering_projection(analytic_bloch_crossing(lam))) <= 1e-9


def test_analytic_floquet_matches_eigensolver():
    m = ParametricModel.floquet_map()
    for lam in np.linspace(0, 2 * np.pi, 401):
        _, _, a = eig_unitary_2x2(operator_at(m, lam))
        assert covering_projection(a).distance(covering_projection(analytic_bloch_floquet(lam))) <= 1e-8


def test_crossing_reconstruction_from_continued_branch(rng):
    m = ParametricModel.crossing()
    for lam in rng.uniform(0, 4 * np.pi, 200):
        E1, E2 = energies_crossing(lam)
        assert E1 == -E2
        H = hamiltonian_from_spectrum(E1, E2, analytic_bloch_crossing(lam))
        np.testing.assert_allclose(H, operator_at(m, lam), atol=1e-12)


def test_perturbed_minimum_gap():
    m = ParametricModel.perturbed(0.1)
    lam = np.linspace(0, 2 * np.pi, 20001)
    levels = np.array([s.levels for s in spectrum(m, lam)])
    gap = levels[:, 0] - levels[:, 1]
    assert gap.min() == pytest.approx(0.1, abs=1e-10)
    assert lam[np.argmin(gap)] == pytest.approx(np.pi, abs=1e-4)
    E1, E2, _ = eig_hermitian_2x2(operator_at(m, np.pi))
    assert E1 - E2 == pytest.approx(0.1, abs=1e-12)


def test_spectrum_crossing_symmetry():
    samples = spectrum(ParametricModel.crossing(), np.linspace(0, 2 * np.pi, 401))
    for s in samples:
        assert s.levels[0] == pytest.approx(-s.levels[1], abs=1e-12)
    assert samples[200].director is DEGENERATE


@pytest.mark.parametrize("model,expected", [
    (ParametricModel.crossing(), lift.Permutation.SWAP),
    (ParametricModel.perturbed(0.1), lift.Permutation.IDENTITY),
    (ParametricModel.floquet_map(), lift.Permutation.SWAP),
], ids=["crossing", "perturbed", "floquet_map"])
def test_director_path_verdicts(model, expected):
    path = director_path(model, 0, 2 * np.pi, 401)
    assert path.closed
    assert lift.holonomy(path, branch_bloch(model, 0)).permutation is expected


def test_crossing_path_uses_analytic_director_at_crossing():
    path = director_path(ParametricModel.crossing(), 0, 2 * np.pi, 401)
    np.testing.assert_allclose(path.vectors[200], [0, 0, 1], atol=1e-12)


def test_open_range_not_closed():
    assert not director_path(ParametricModel.crossing(), 0, 3.0, 50).closed


def test_floquet_degeneracy_reported():
    m = ParametricModel.floquet_map(h0=(0.0, 0.0, 0.0, 0.0))
    with pytest.raises(DegeneracyOnPath) as info:
        director_path(m, 0, 2 * np.pi, 11)
    assert info.value.lam == pytest.approx(0.0)


def test_model_validation():
    with pytest.raises(ValueError):
        ParametricModel("nope")
    with pytest.raises(ValueError):
        ParametricModel.perturbed(0.0)
    with pytest.raises(ValueError):
        ParametricModel.floquet_map(kick_bloch=(1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        director_path(ParametricModel.crossing(), 0, 1, 1)


def test_branch_bloch_lower_is_negated():
    m = ParametricModel.perturbed(0.1)
    np.testing.assert_array_equal(branch_bloch(m, 0.3, "lower"), -branch_bloch(m, 0.3, "upper"))
    np.testing.assert_allclose(branch_bloch(ParametricModel.crossing(), np.pi), [0, 0, 1], atol=1e-15)
