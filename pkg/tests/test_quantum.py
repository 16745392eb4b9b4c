import numpy as np
import pytest
from hypothesis import given, strategies as st

from unilab import dynamics, linalg, quantum
from unilab.dynamics import HamiltonianSchedule, UnitaryEvolution
from unilab.errors import DimensionError, RangeError, ValidationError

seeds = st.integers(0, 2**32 - 1)


def random_density(n, rng, rank=None):
    rank = rank or n
    x = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


@given(seeds, st.integers(2, 6), st.floats(-3, 3))
def test_correspondence_diagonal_density(seed, n, t):
    rng = np.random.default_rng(seed)
    ev = UnitaryEvolution(HamiltonianSchedule.constant(linalg.random_hermitian(n, rng), 3.0))
    p0 = rng.dirichlet(np.ones(n))
    u = ev.evaluate(t)
    rho_t = quantum.evolve_density(quantum.density_from_distribution(p0), u)
    p_t = dynamics.propagate(dynamics.unistochastic_from_unitary(u), p0)
    np.testing.assert_allclose(np.real(np.diagonal(rho_t)), p_t, atol=1e-10)


def test_born_rule_and_state_evolution(rng):
    u = linalg.random_unitary(4, rng)
    psi = quantum.evolve_state(np.eye(4)[2], u)
    np.testing.assert_allclose(quantum.born_rule(psi), np.abs(u[:, 2]) ** 2)
    with pytest.raises(ValidationError):
        quantum.born_rule([1.0, 1.0])
    with pytest.raises(DimensionError):
        quantum.evolve_state([1.0, 0.0], u)


def test_observable_kinds():
    assert quantum.Observable.from_values([1, -1, 3]).kind == "beable"
    assert quantum.Observable(linalg.SIGMA_X).kind == "emergeable"
    with pytest.raises(ValidationError):
        quantum.Observable(np.array([[0, 1], [0, 0]]))


def test_expectation_and_projectors(rng):
    rho = random_density(3, rng)
    total = sum(quantum.expectation(quantum.config_projector(3, i), rho) for i in range(3))
    assert total == pytest.approx(1.0, abs=1e-12)
    beable = quantum.Observable.from_values([1.0, 2.0, 5.0])
    assert quantum.expectation(beable, rho) == pytest.approx(np.real(np.diagonal(rho)) @ [1, 2, 5])
    with pytest.raises(IndexError):
        quantum.config_projector(3, 3)
    with pytest.raises(DimensionError):
        quantum.expectation(quantum.config_projector(2, 0), rho)


def test_density_validation():
    with pytest.raises(ValidationError):
        quantum.as_density(np.diag([0.7, 0.7]))
    with pytest.raises(ValidationError):
        quantum.as_density(np.diag([1.5, -0.5]))


def test_von_neumann_residual_second_order(rng):
    for _ in range(10):
        n = int(rng.integers(2, 5))
        ev = UnitaryEvolution(HamiltonianSchedule.constant(linalg.random_hermitian(n, rng), 2.0))
        rho0 = random_density(n, rng)
        t = float(rng.uniform(-1.5, 1.5))
        r1 = quantum.von_neumann_residual(ev, rho0, t, 1e-3)
        r2 = quantum.von_neumann_residual(ev, rho0, t, 5e-4)
        assert 0.2 <= r2 / r1 <= 0.3


def test_von_neumann_residual_refuses_boundary(rng):
    h1, h2 = linalg.random_hermitian(2, rng), linalg.random_hermitian(2, rng)
    ev = UnitaryEvolution(HamiltonianSchedule(((1.0, h1), (1.0, h2))))
    rho0 = random_density(2, rng)
    with pytest.raises(RangeError):
        quantum.von_neumann_residual(ev, rho0, 1.0005, 1e-3)
    with pytest.raises(RangeError):
        quantum.von_neumann_residual(ev, rho0, 1.9999, 1e-3)
    assert quantum.von_neumann_residual(ev, rho0, 1.5, 1e-3) < 1e-4
