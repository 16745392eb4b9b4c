"""Hilbert-space representation of a unistochastic process.

Density matrices and state vectors are ``numpy`` arrays checked by
:func:`as_density` and :func:`as_state`. Observables carry their matrix plus a
``kind`` tag: ``"beable"`` for configuration-diagonal matrices and
``"emergeable"`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .dynamics import UnitaryEvolution
from .errors import DimensionError, RangeError, ValidationError
from .linalg import as_probability_vector, max_abs, require_hermitian, require_unitary


def as_density(rho, tol: float | None = None) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of ``rho``."""
    tol_p = tolerances.tol_prob(tol)
    rho = require_hermitian(rho, tolerances.TOL_HERM, "density matrix")
    if abs(np.trace(rho) - 1) > tol_p:
        raise ValidationError(f"density matrix trace is {np.trace(rho).real:.12g}, not 1")
    if np.linalg.eigvalsh(rho).min() < -tolerances.TOL_HERM:
        raise ValidationError("density matrix is not positive semidefinite")
    return (rho + rho.conj().T) / 2


def as_state(psi, tol: float | None = None) -> np.ndarray:
    tol = tolerances.tol_prob(tol)
    psi = np.array(psi, dtype=complex)
    if psi.ndim != 1 or psi.size == 0:
        raise DimensionError(f"state vector must be 1-d, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1) > tol:
        raise ValidationError(f"state vector norm is {np.linalg.norm(psi):.12g}, not 1")
    return psi


@dataclass(frozen=True)
class Observable:
    matrix: np.ndarray

    def __post_init__(self):
        m = require_hermitian(self.matrix, name="observable")
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def kind(self) -> str:
        off = self.matrix - np.diag(np.diagonal(self.matrix))
        return "beable" if max_abs(off) <= tolerances.TOL_HERM else "emergeable"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_values(cls, values) -> "Observable":
        """Beable whose value in configuration ``i`` is ``values[i]``."""
        return cls(np.diag(np.asarray(values, dtype=float)).astype(complex))


def density_from_distribution(p) -> np.ndarray:
    return np.diag(as_probability_vector(p)).astype(complex)


def evolve_density(rho0, u) -> np.ndarray:
    """``rho(t) = U rho(0) U^dagger``."""
    rho0 = as_density(rho0)
    u = require_unitary(u)
    if u.shape != rho0.shape:
        raise DimensionError(f"unitary {u.shape} does not match density matrix {rho0.shape}")
    rho = u @ rho0 @ u.conj().T
    return (rho + rho.conj().T) / 2


def evolve_state(psi0, u) -> np.ndarray:
    psi0 = as_state(psi0)
    u = require_unitary(u)
    if u.shape[1] != psi0.shape[0]:
        raise DimensionError(f"unitary {u.shape} does not match state of size {psi0.shape[0]}")
    return u @ psi0


def born_rule(psi) -> np.ndarray:
    """Configuration probabilities ``|psi_i|^2``."""
    return as_probability_vector(np.abs(as_state(psi)) ** 2)


def expectation(obs: Observable, rho) -> float:
    """``tr(A rho)``; an imaginary residue above ``TOL_HERM`` is an error."""
    rho = as_density(rho)
    if obs.dim != rho.shape[0]:
        raise DimensionError(f"observable of size {obs.dim} vs density matrix of size {rho.shape[0]}")
    value = np.trace(obs.matrix @ rho)
    if abs(value.imag) > tolerances.TOL_HERM:
        raise ValidationError(f"expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


def config_projector(dim: int, i: int) -> Observable:
    if not 0 <= i < dim:
        raise IndexError(f"configuration {i} out of range for dimension {dim}")
    m = np.zeros((dim, dim), dtype=complex)
    m[i, i] = 1
    return Observable(m)


def von_neumann_residual(ev: UnitaryEvolution, rho0, t: float, dt: float) -> float:
    """Max-abs mismatch between a central difference of ``rho(t)`` and ``-i[H(t), rho(t)]``.

    The stencil ``t - dt, t + dt`` must lie on one smooth piece of the
    schedule; straddling a segment boundary raises :class:`RangeError`.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    rho0 = as_density(rho0)
    t = ev.check_time(t)
    ev.check_time(t - dt)
    ev.check_time(t + dt)
    lo, hi = ev.smooth_interval(t)
    if t - dt < lo or t + dt > hi:
        raise RangeError(f"stencil [{t - dt}, {t + dt}] crosses a segment boundary")

    def rho(s):
        u = ev.evaluate(s)
        return u @ rho0 @ u.conj().T

    drho = (rho(t + dt) - rho(t - dt)) / (2 * dt)
    h = ev.hamiltonian(t)
    r = rho(t)
    return max_abs(drho + 1j * (h @ r - r @ h))
