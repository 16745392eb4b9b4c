"""Unistochastic transition matrices, divisibility and division events.

A :class:`HamiltonianSchedule` holds piecewise-constant Hamiltonians starting
at time 0. :class:`UnitaryEvolution` turns it into ``U(t)``; negative times are
reached by running the schedule backwards, ``U(-s) = U(s)^dagger``, so the
support is ``[-T, T]`` for total duration ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from . import tolerances
from .errors import DimensionError, RangeError, ValidationError
from .linalg import (
    as_probability_vector,
    as_stochastic,
    herm_expm,
    max_abs,
    require_hermitian,
    require_unitary,
)


@dataclass(frozen=True)
class HamiltonianSchedule:
    """Ordered ``(duration, h)`` segments sharing one dimension."""

    segments: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        if not self.segments:
            raise ValidationError("schedule needs at least one segment")
        cleaned = []
        dim = None
        for duration, h in self.segments:
            duration = float(duration)
            if not duration > 0 or not np.isfinite(duration):
                raise ValidationError(f"segment duration must be positive, got {duration}")
            h = require_hermitian(h, name="segment Hamiltonian")
            if dim is None:
                dim = h.shape[0]
            elif h.shape[0] != dim:
                raise DimensionError("all segment Hamiltonians must share one dimension")
            h = h.copy()
            h.setflags(write=False)
            cleaned.append((duration, h))
        object.__setattr__(self, "segments", tuple(cleaned))

    @classmethod
    def constant(cls, h, duration: float) -> "HamiltonianSchedule":
        return cls(((duration, h),))

    @property
    def dim(self) -> int:
        return self.segments[0][1].shape[0]

    @property
    def duration(self) -> float:
        return float(sum(d for d, _ in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        """Segment end times, ``[0, d1, d1+d2, ..., T]``."""
        return np.concatenate([[0.0], np.cumsum([d for d, _ in self.segments])])


@dataclass(frozen=True)
class UnitaryEvolution:
    schedule: HamiltonianSchedule
    _checkpoints: tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        u = np.eye(self.schedule.dim, dtype=complex)
        points = [u]
        for duration, h in self.schedule.segments:
            u = herm_expm(h, duration) @ u
            points.append(u)
        object.__setattr__(self, "_checkpoints", tuple(points))

    @property
    def dim(self) -> int:
        return self.schedule.dim

    def _locate(self, s: float) -> int:
        """Index of the segment containing ``0 <= s <= T``."""
        bounds = self.schedule.boundaries
        k = int(np.searchsorted(bounds, s, side="right")) - 1
        return min(max(k, 0), len(self.schedule.segments) - 1)

    def check_time(self, t: float) -> float:
        t = float(t)
        total = self.schedule.duration
        slack = 1e-12 * max(1.0, total)
        if not np.isfinite(t) or abs(t) > total + slack:
            raise RangeError(f"time {t} outside schedule support [-{total}, {total}]")
        return float(np.clip(t, -total, total))

    def evaluate(self, t: float) -> np.ndarray:
        """``U(t)``, with ``U(0) = I``."""
        t = self.check_time(t)
        s = abs(t)
        k = self._locate(s)
        start = self.schedule.boundaries[k]
        u = herm_expm(self.schedule.segments[k][1], s - start) @ self._checkpoints[k]
        return u if t >= 0 else u.conj().T

    def hamiltonian(self, t: float) -> np.ndarray:
        """Generator ``H(t) = i (dU/dt) U^dagger`` at ``t``.

        For ``t >= 0`` this is the active segment matrix. On the reversed
        branch it is that matrix conjugated by ``U(t)``.
        """
        t = self.check_time(t)
        h = self.schedule.segments[self._locate(abs(t))][1]
        if t >= 0:
            return h
        u = self.evaluate(t)
        return u @ h @ u.conj().T

    def smooth_interval(self, t: float) -> tuple[float, float]:
        """Largest interval around ``t`` on which ``U`` is analytic."""
        t = self.check_time(t)
        bounds = self.schedule.boundaries
        k = self._locate(abs(t))
        lo, hi = bounds[k], bounds[k + 1]
        if k == 0:
            lo = -hi
        return (lo, hi) if t >= 0 else (-hi, -lo)


def unistochastic_from_unitary(u, tol: float = tolerances.TOL_UNITARY) -> np.ndarray:
    """Transition matrix with entries ``|U_ij|^2``."""
    u = require_unitary(u, tol)
    return as_stochastic(np.abs(u) ** 2, max(tolerances.tol_prob(), 10 * tol))


def propagate(gamma, p0) -> np.ndarray:
    """``p(t) = Gamma(t) p(0)``."""
    gamma = as_stochastic(gamma)
    p0 = as_probability_vector(p0)
    if gamma.shape[1] != p0.shape[0]:
        raise DimensionError(f"matrix of size {gamma.shape[0]} cannot act on vector of size {p0.shape[0]}")
    return as_probability_vector(gamma @ p0)


def relative_unitary(ev: UnitaryEvolution, t: float, t_prime: float) -> np.ndarray:
    """``U(t <- t') = U(t) U(t')^dagger``."""
    return ev.evaluate(t) @ ev.evaluate(t_prime).conj().T


def _witness_ok(gamma_t, gamma_tp, m, tol_residual) -> bool:
    return max_abs(gamma_t - m @ gamma_tp) <= tol_residual


def _lp_divisor(gamma_t: np.ndarray, gamma_tp: np.ndarray, tol_lp: float) -> np.ndarray | None:
    """Feasibility phase for ``M gamma_tp = gamma_t``, ``M >= 0``, columns of M sum to 1.

    Equality residuals get split slack variables and their total is minimised;
    the system is feasible iff the optimal residual vanishes to ``tol_lp``.
    """
    n = gamma_t.shape[0]
    nm = n * n
    # M is vectorised row-major: x[i*n + k] = M[i, k].
    a_prod = np.zeros((nm, nm))
    for i in range(n):
        for j in range(n):
            a_prod[i * n + j, i * n:(i + 1) * n] = gamma_tp[:, j]
    a_cols = np.zeros((n, nm))
    for k in range(n):
        a_cols[k, k::n] = 1.0
    eye = np.eye(nm)
    a_eq = np.block([
        [a_prod, eye, -eye],
        [a_cols, np.zeros((n, 2 * nm))],
    ])
    b_eq = np.concatenate([gamma_t.reshape(-1), np.ones(n)])
    c = np.concatenate([np.zeros(nm), np.ones(2 * nm)])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    m = res.x[:nm].reshape(n, n)
    m = np.where(m < 0, 0.0, m)
    m = m / m.sum(axis=0)
    return m if _witness_ok(gamma_t, gamma_tp, m, tol_lp) else None


def divisibility_decide(
    gamma_t,
    gamma_tp,
    tol: float | None = None,
    cond_max: float = tolerances.COND_MAX,
    tol_lp: float = tolerances.TOL_LP,
) -> tuple[bool, np.ndarray | None]:
    """Does a stochastic ``M`` with ``gamma_t = M gamma_tp`` exist?

    Returns ``(True, M)`` with a column-stochastic witness, or ``(False, None)``.
    Well-conditioned ``gamma_tp`` is inverted directly (the divisor is then
    unique); otherwise a linear-programming feasibility phase decides.
    """
    tol = tolerances.tol_prob(tol)
    gamma_t = as_stochastic(gamma_t, tol)
    gamma_tp = as_stochastic(gamma_tp, tol)
    if gamma_t.shape != gamma_tp.shape:
        raise DimensionError(f"shapes differ: {gamma_t.shape} vs {gamma_tp.shape}")
    if np.linalg.cond(gamma_tp) <= cond_max:
        m = gamma_t @ np.linalg.inv(gamma_tp)
        try:
            m = as_stochastic(m, tol)
        except ValidationError:
            return False, None
        return True, m
    m = _lp_divisor(gamma_t, gamma_tp, tol_lp)
    return (m is not None), m


@dataclass(frozen=True)
class TransitionReport:
    t: float
    t_prime: float
    gamma_t: np.ndarray
    gamma_tprime: np.ndarray
    gamma_relative: np.ndarray
    gamma_nearest_divisible: np.ndarray
    interference: np.ndarray
    interference_norm: float
    divisible: bool
    witness: np.ndarray | None

    def to_dict(self) -> dict:
        def mat(x):
            return None if x is None else x.tolist()

        return {
            "t": self.t,
            "t_prime": self.t_prime,
            "gamma_t": mat(self.gamma_t),
            "gamma_tprime": mat(self.gamma_tprime),
            "gamma_relative": mat(self.gamma_relative),
            "gamma_nearest_divisible": mat(self.gamma_nearest_divisible),
            "interference": mat(self.interference),
            "interference_norm": self.interference_norm,
            "divisible": self.divisible,
            "witness": mat(self.witness),
        }


def _between(t: float, t_prime: float) -> bool:
    lo, hi = min(0.0, t), max(0.0, t)
    slack = 1e-12 * max(1.0, abs(t))
    return lo - slack <= t_prime <= hi + slack


def transition_report(
    ev: UnitaryEvolution, t: float, t_prime: float, tol: float | None = None
) -> TransitionReport:
    """Actual versus nearest-divisible dynamics across an intermediate time ``t'``."""
    t = ev.check_time(t)
    t_prime = ev.check_time(t_prime)
    if not _between(t, t_prime):
        raise RangeError(f"intermediate time {t_prime} is not between 0 and {t}")
    u_t = ev.evaluate(t)
    u_tp = ev.evaluate(t_prime)
    gamma_t = unistochastic_from_unitary(u_t)
    gamma_tp = unistochastic_from_unitary(u_tp)
    gamma_rel = unistochastic_from_unitary(u_t @ u_tp.conj().T)
    nearest = gamma_rel @ gamma_tp
    interference = gamma_t - nearest
    divisible, witness = divisibility_decide(gamma_t, gamma_tp, tol)
    return TransitionReport(
        t=t,
        t_prime=t_prime,
        gamma_t=gamma_t,
        gamma_tprime=gamma_tp,
        gamma_relative=gamma_rel,
        gamma_nearest_divisible=nearest,
        interference=interference,
        interference_norm=max_abs(interference),
        divisible=divisible,
        witness=witness,
    )


class ScanPoint(NamedTuple):
    t_prime: float
    interference_norm: float
    divisible: bool


def division_event_scan(
    ev: UnitaryEvolution, t: float, grid: Sequence[float], tol: float | None = None
) -> list[ScanPoint]:
    """Summaries of :func:`transition_report` over candidate intermediate times.

    Points with ``divisible=True`` are division events. All of them are
    returned in grid order.
    """
    out = []
    for tp in grid:
        rep = transition_report(ev, t, tp, tol)
        out.append(ScanPoint(rep.t_prime, rep.interference_norm, rep.divisible))
    return out


def division_events(scan: Sequence[ScanPoint]) -> list[float]:
    return [p.t_prime for p in scan if p.divisible]
