"""EPR, Bell and CHSH analysis.

The quantum side uses four subsystems ``Q, R, A, B``: two spin-1/2 systems
``Q`` and ``R`` that interact once (state preparation up to the interaction
time ``t'``) and two observer pointers ``A`` and ``B``. A measurement at
setting ``theta`` is a local rotation of the spin followed by a controlled
copy of its configuration into the pointer. Everything is ordinary unitary
dynamics, so outcome statistics come straight out of the unistochastic
transition matrix.

The local-hidden-variable side covers finite models with stochastic
responses (:class:`LocalCausalModel`) and the classic deterministic sign
model sampled by Monte Carlo (:class:`DeterministicLHV`).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import tolerances
from .bayesnet import JointDistribution
from .causality import CompositeSystem, marginal_conditional
from .dynamics import HamiltonianSchedule, UnitaryEvolution, unistochastic_from_unitary
from .errors import DimensionError, PremiseError, ValidationError
from .linalg import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    kron,
    max_abs,
    operator_schmidt_values,
    partial_trace,
    permute_subsystems,
    require_unitary,
)
from .quantum import Observable, expectation

LABELS = ("Q", "R", "A", "B")
COUPLINGS = ("controlled_copy", "identity")
MC_CHUNK = 1 << 16


# ---------------------------------------------------------------------------
# Quantum scenario


def singlet_prep_hamiltonian(t_prime: float) -> np.ndarray:
    """Two-qubit generator taking ``|01>`` to ``(|01> - |10>)/sqrt(2)`` in time ``t_prime``.

    It rotates within the span of ``|01>`` and ``|10>`` and leaves ``|00>``
    and ``|11>`` fixed.
    """
    c = np.pi / (4 * t_prime)
    h = np.zeros((4, 4), dtype=complex)
    h[2, 1] = -1j * c
    h[1, 2] = 1j * c
    return h


@dataclass(frozen=True)
class BellScenario:
    settings_a: tuple[float, ...]
    settings_b: tuple[float, ...]
    interaction_time: float
    readout_time: float
    state_prep: HamiltonianSchedule
    initial_config: tuple[int, int, int, int] = (0, 1, 0, 0)
    dims: tuple[int, int, int, int] = (2, 2, 2, 2)
    coupling: str = "controlled_copy"
    _prep_unitary: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sa = tuple(float(x) for x in self.settings_a)
        sb = tuple(float(x) for x in self.settings_b)
        if not sa or not sb:
            raise ValidationError("each side needs at least one setting")
        tp, t = float(self.interaction_time), float(self.readout_time)
        if not 0 < tp <= t:
            raise ValidationError(f"need 0 < interaction_time <= readout_time, got {tp}, {t}")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 4 or dims[0] != 2 or dims[1] != 2:
            raise ValidationError(f"Q and R must be qubits, got dims {dims}")
        if dims[2] < 2 or dims[3] < 2:
            raise ValidationError(f"pointer dimensions must be at least 2, got {dims}")
        init = tuple(int(x) for x in self.initial_config)
        if len(init) != 4 or any(not 0 <= c < d for c, d in zip(init, dims)):
            raise ValidationError(f"initial configuration {init} incompatible with dims {dims}")
        if self.coupling not in COUPLINGS:
            raise ValidationError(f"unknown coupling {self.coupling!r}; choose from {COUPLINGS}")
        if self.state_prep.dim != dims[0] * dims[1]:
            raise DimensionError(
                f"state preparation acts on dimension {self.state_prep.dim}, QR needs {dims[0] * dims[1]}"
            )
        u_prep = UnitaryEvolution(self.state_prep).evaluate(tp)
        for name, value in (("settings_a", sa), ("settings_b", sb), ("interaction_time", tp),
                            ("readout_time", t), ("dims", dims), ("initial_config", init),
                            ("_prep_unitary", u_prep)):
            object.__setattr__(self, name, value)

    @classmethod
    def singlet(
        cls,
        settings_a: Sequence[float] = (0.0, np.pi / 2),
        settings_b: Sequence[float] = (np.pi / 4, 3 * np.pi / 4),
        interaction_time: float = 1.0,
        readout_time: float = 2.0,
        **kw,
    ) -> "BellScenario":
        prep = HamiltonianSchedule.constant(singlet_prep_hamiltonian(interaction_time), interaction_time)
        return cls(tuple(settings_a), tuple(settings_b), interaction_time, readout_time, prep, **kw)

    @property
    def system(self) -> CompositeSystem:
        return CompositeSystem(LABELS, self.dims)

    def shared_state(self) -> np.ndarray:
        """QR wave function at the interaction time."""
        q0, r0 = self.initial_config[:2]
        psi0 = np.zeros(self.dims[0] * self.dims[1], dtype=complex)
        psi0[q0 * self.dims[1] + r0] = 1
        return self._prep_unitary @ psi0


def setting_rotation(theta: float) -> np.ndarray:
    """Rotation mapping the spin observable at ``theta`` onto ``sigma_z``."""
    return np.cos(theta / 2) * np.eye(2) + 1j * np.sin(theta / 2) * SIGMA_Y


def spin_observable(theta: float) -> np.ndarray:
    """``cos(theta) sigma_z + sin(theta) sigma_x``, eigenvalue +1 read as outcome +1."""
    return np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X


def pointer_copy(d_sys: int, d_ptr: int) -> np.ndarray:
    """Permutation ``|s, p> -> |s, (p + s) mod d_ptr>`` on system (x) pointer."""
    n = d_sys * d_ptr
    u = np.zeros((n, n), dtype=complex)
    for s in range(d_sys):
        for p in range(d_ptr):
            u[s * d_ptr + (p + s) % d_ptr, s * d_ptr + p] = 1
    return u


def local_measurement(theta: float, d_ptr: int, coupling: str = "controlled_copy") -> np.ndarray:
    """Relative evolution of one wing (spin (x) pointer) from ``t'`` to ``t``."""
    if coupling == "identity":
        return np.eye(2 * d_ptr, dtype=complex)
    return pointer_copy(2, d_ptr) @ kron(setting_rotation(theta), np.eye(d_ptr))


def relative_evolution(scenario: BellScenario, angle_a: float, angle_b: float) -> np.ndarray:
    """``U_QA (x) U_RB`` reordered to the ``Q, R, A, B`` factor order."""
    dq, dr, da, db = scenario.dims
    u_qa = local_measurement(angle_a, da, scenario.coupling)
    u_rb = local_measurement(angle_b, db, scenario.coupling)
    return permute_subsystems(kron(u_qa, u_rb), (dq, da, dr, db), (0, 2, 1, 3))


def check_wing_factorization(u_rel, dims: Sequence[int], tol: float = 1e-9) -> float:
    """Relative size of the second operator-Schmidt value of ``u_rel`` across ``QA | RB``.

    Raises :class:`PremiseError` when the relative evolution couples the two wings.
    """
    dq, dr, da, db = dims
    u_rel = require_unitary(u_rel, name="relative evolution")
    if u_rel.shape[0] != dq * dr * da * db:
        raise DimensionError(f"relative evolution has size {u_rel.shape[0]}, expected {dq * dr * da * db}")
    u_wings = permute_subsystems(u_rel, (dq, dr, da, db), (0, 2, 1, 3))
    s = operator_schmidt_values(u_wings, dq * da, dr * db)
    ratio = float(s[1] / s[0]) if len(s) > 1 else 0.0
    if ratio > tol:
        raise PremiseError(
            f"relative evolution does not factorize across QA|RB (Schmidt ratio {ratio:.3g})"
        )
    return ratio


def full_unitary(scenario: BellScenario, angle_a: float, angle_b: float, u_rel=None) -> np.ndarray:
    """``U_QRAB(t) = U(t <- t') (U_prep(t') (x) I_A (x) I_B)``."""
    dq, dr, da, db = scenario.dims
    if u_rel is None:
        u_rel = relative_evolution(scenario, angle_a, angle_b)
    return u_rel @ kron(scenario._prep_unitary, np.eye(da * db))


def transition_matrix(scenario: BellScenario, angle_a: float, angle_b: float, u_rel=None) -> np.ndarray:
    return unistochastic_from_unitary(full_unitary(scenario, angle_a, angle_b, u_rel))


def _outcome_signs(scenario: BellScenario) -> tuple[np.ndarray, np.ndarray]:
    """Outcome value (+1/-1) for each final pointer configuration of A and B."""
    _, _, da, db = scenario.dims
    a0, b0 = scenario.initial_config[2:]
    sa = np.where((np.arange(da) - a0) % da == 0, 1.0, -1.0)
    sb = np.where((np.arange(db) - b0) % db == 0, 1.0, -1.0)
    return sa, sb


def pointer_distribution(scenario: BellScenario, angle_a: float, angle_b: float) -> np.ndarray:
    """``p(a_t, b_t | initial configuration)`` read off the transition matrix."""
    cs = scenario.system
    gamma = transition_matrix(scenario, angle_a, angle_b)
    j0 = int(np.ravel_multi_index(scenario.initial_config, scenario.dims))
    pab = marginal_conditional(cs, gamma, ["A", "B"])[:, j0]
    return pab.reshape(scenario.dims[2], scenario.dims[3])


@dataclass(frozen=True)
class Correlator:
    value: float
    setting_a: float
    setting_b: float
    stderr: float | None = None

    def __post_init__(self):
        if abs(self.value) > 1 + tolerances.tol_prob():
            raise ValidationError(f"correlator {self.value} outside [-1, 1]")

    def to_dict(self) -> dict:
        d = {"value": self.value, "setting_a": self.setting_a, "setting_b": self.setting_b}
        if self.stderr is not None:
            d["stderr"] = self.stderr
        return d


def quantum_correlator(scenario: BellScenario, angle_a: float, angle_b: float) -> Correlator:
    """``E(a, b) = sum_{A,B} A B p(A, B)`` from the pointer statistics."""
    p = pointer_distribution(scenario, angle_a, angle_b)
    sa, sb = _outcome_signs(scenario)
    return Correlator(float(sa @ p @ sb), float(angle_a), float(angle_b))


def density_correlator(scenario: BellScenario, angle_a: float, angle_b: float) -> Correlator:
    """Same correlator as ``tr((sigma_a (x) sigma_b) rho_QR(t'))``, with no pointers involved."""
    psi = scenario.shared_state()
    rho = np.outer(psi, psi.conj())
    obs = Observable(kron(spin_observable(angle_a), spin_observable(angle_b)))
    return Correlator(expectation(obs, rho), float(angle_a), float(angle_b))


def singlet_correlator(angle_a: float, angle_b: float) -> float:
    return -float(np.cos(angle_a - angle_b))


def chsh_combination(e_ab: float, e_abp: float, e_apb: float, e_apbp: float) -> float:
    """``|E(a,b) - E(a,b') + E(a',b) + E(a',b')|``."""
    return abs(e_ab - e_abp + e_apb + e_apbp)


def _chsh(settings_a, settings_b, corr: Callable[[float, float], float]) -> float:
    if len(settings_a) != 2 or len(settings_b) != 2:
        raise ValidationError("CHSH needs exactly two settings per side")
    a, ap = settings_a
    b, bp = settings_b
    return chsh_combination(corr(a, b), corr(a, bp), corr(ap, b), corr(ap, bp))


def chsh_value(scenario: BellScenario) -> float:
    return _chsh(scenario.settings_a, scenario.settings_b,
                 lambda a, b: quantum_correlator(scenario, a, b).value)


class Bell1964Result(NamedTuple):
    lhs: float
    rhs: float
    satisfied: bool


def bell_1964_check(
    p_ab: Correlator, p_ac: Correlator, p_bc: Correlator, tol: float | None = None
) -> Bell1964Result:
    """``1 + P(b, c) >= |P(a, b) - P(a, c)|``, satisfied up to ``tol``."""
    tol = tolerances.tol_prob(tol)
    same = lambda x, y: abs(x - y) <= 1e-12  # noqa: E731
    if not (same(p_ab.setting_a, p_ac.setting_a) and same(p_ab.setting_b, p_bc.setting_a)
            and same(p_ac.setting_b, p_bc.setting_b)):
        raise ValidationError("correlators do not share settings as (a,b), (a,c), (b,c)")
    lhs = 1 + p_bc.value
    rhs = abs(p_ab.value - p_ac.value)
    return Bell1964Result(lhs, rhs, lhs >= rhs - tol)


# ---------------------------------------------------------------------------
# EPR no-signalling


@dataclass(frozen=True)
class EPRReport:
    variation_b0: float
    variation_b_setting: float
    reduced_state_variation: float
    max_variation: float
    no_signaling: bool
    p_a: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "variation_b0": self.variation_b0,
            "variation_b_setting": self.variation_b_setting,
            "reduced_state_variation": self.reduced_state_variation,
            "max_variation": self.max_variation,
            "no_signaling": self.no_signaling,
            "p_a": self.p_a,
        }


def _spread(x: np.ndarray, axis: int) -> float:
    """Largest difference between slices along ``axis``."""
    return float(np.max(x.max(axis=axis) - x.min(axis=axis))) if x.shape[axis] > 1 else 0.0


def epr_no_signaling(
    scenario: BellScenario,
    u_rel: np.ndarray | None = None,
    tol: float = tolerances.TOL_CAUSAL,
) -> EPRReport:
    """How much A's marginal law depends on B's initial configuration and setting.

    For every pair of settings the full 4-subsystem transition matrix is
    marginalised to ``p(a_t | q0, r0, a0, b0)``. The report gives the largest
    spread of that table over ``b0`` (others held fixed) and over B's setting
    (A's setting held fixed). It also gives the spread of the reduced state
    ``rho_QA(t)`` over ``b0`` and B's setting.

    ``u_rel`` replaces the built-in relative evolution for all settings; it
    must factorize across ``QA | RB`` or :class:`PremiseError` is raised.
    """
    dq, dr, da, db = scenario.dims
    cs = scenario.system
    if u_rel is not None:
        check_wing_factorization(u_rel, scenario.dims)
    tables = np.empty((len(scenario.settings_a), len(scenario.settings_b), da, dq, dr, da, db))
    reduced = []
    q0, r0, a0, _ = scenario.initial_config
    for i, a in enumerate(scenario.settings_a):
        row = []
        for k, b in enumerate(scenario.settings_b):
            rel = relative_evolution(scenario, a, b) if u_rel is None else u_rel
            check_wing_factorization(rel, scenario.dims)
            u = full_unitary(scenario, a, b, rel)
            gamma = unistochastic_from_unitary(u)
            tables[i, k] = marginal_conditional(cs, gamma, "A").reshape(da, dq, dr, da, db)
            per_b0 = []
            for b0 in range(db):
                j = np.ravel_multi_index((q0, r0, a0, b0), scenario.dims)
                col = u[:, j]
                rho = np.outer(col, col.conj())
                per_b0.append(partial_trace(rho, scenario.dims, keep=(0, 2)))
            row.append(per_b0)
        reduced.append(row)
    var_b0 = _spread(tables, axis=6)
    var_setting = _spread(tables, axis=1)
    red = np.array(reduced)  # (n_a, n_b, db, dq*da, dq*da)
    red = red.reshape(red.shape[0], -1, *red.shape[3:])
    red_var = max(max_abs(red[i] - red[i][0]) for i in range(red.shape[0]))
    worst = max(var_b0, var_setting, red_var)
    p_a = tables[:, 0, :, q0, r0, a0, scenario.initial_config[3]].tolist()
    return EPRReport(var_b0, var_setting, red_var, worst, worst <= tol, p_a)


def outcome_common_cause_joint(
    scenario: BellScenario, angle_a: float, angle_b: float, c_weights=None
) -> JointDistribution:
    """Joint over pointer outcomes ``A``, ``B`` and the initial ``QR`` configuration ``C``.

    ``C`` indexes the ``dq * dr`` initial configurations of the pair (row-major,
    pointers start as in the scenario) and ``p(A, B | C)`` is the directed
    conditional read from the transition matrix. By default ``C`` is a point
    mass on the scenario's own initial configuration; ``c_weights`` replaces
    that distribution.
    """
    dq, dr, da, db = scenario.dims
    q0, r0, a0, b0 = scenario.initial_config
    if c_weights is None:
        c_weights = np.zeros(dq * dr)
        c_weights[q0 * dr + r0] = 1.0
    c_weights = np.asarray(c_weights, dtype=float)
    if c_weights.shape != (dq * dr,):
        raise DimensionError(f"c_weights needs {dq * dr} entries, got shape {c_weights.shape}")
    gamma = transition_matrix(scenario, angle_a, angle_b)
    cond = marginal_conditional(scenario.system, gamma, ["A", "B"])
    sa, sb = _outcome_signs(scenario)
    # Collapse pointer values onto outcome index 0 (+1) / 1 (-1).
    ia = (sa < 0).astype(int)
    ib = (sb < 0).astype(int)
    probs = np.zeros((2, 2, dq * dr))
    for c in range(dq * dr):
        j = np.ravel_multi_index((c // dr, c % dr, a0, b0), scenario.dims)
        pab = cond[:, j].reshape(da, db)
        for x in range(da):
            for y in range(db):
                probs[ia[x], ib[y], c] += pab[x, y] * c_weights[c]
    return JointDistribution(("A", "B", "C"), probs)


# ---------------------------------------------------------------------------
# Local hidden-variable models


def _setting_index(settings: Sequence[float], angle: float) -> int:
    for k, s in enumerate(settings):
        if abs(s - angle) <= 1e-12:
            return k
    raise KeyError(f"setting {angle} not in model settings {tuple(settings)}")


@dataclass(frozen=True)
class LocalCausalModel:
    """Finite hidden-variable model with stochastic local responses.

    ``response_a[s, k] = (p(A=+1 | a_s, lambda_k), p(A=-1 | a_s, lambda_k))`` and
    likewise for B. Parameter and outcome independence hold by construction:
    A's response never sees B's setting or outcome.
    """

    lambda_support: tuple
    rho_lambda: np.ndarray
    settings_a: tuple[float, ...]
    settings_b: tuple[float, ...]
    response_a: np.ndarray
    response_b: np.ndarray

    def __post_init__(self):
        tol = tolerances.tol_prob()
        rho = np.array(self.rho_lambda, dtype=float)
        n = len(self.lambda_support)
        if rho.shape != (n,) or rho.min() < -tol or abs(rho.sum() - 1) > tol:
            raise ValidationError("rho_lambda must be a probability vector over lambda_support")
        ra = np.array(self.response_a, dtype=float)
        rb = np.array(self.response_b, dtype=float)
        sa = tuple(float(x) for x in self.settings_a)
        sb = tuple(float(x) for x in self.settings_b)
        for name, r, s in (("response_a", ra, sa), ("response_b", rb, sb)):
            if r.shape != (len(s), n, 2):
                raise ValidationError(f"{name} must have shape ({len(s)}, {n}, 2), got {r.shape}")
            if r.min() < -tol or np.max(np.abs(r.sum(axis=-1) - 1)) > tol:
                raise ValidationError(f"{name} rows must be probability distributions over (+1, -1)")
            r.setflags(write=False)
        rho.setflags(write=False)
        for name, value in (("lambda_support", tuple(self.lambda_support)), ("rho_lambda", rho),
                            ("settings_a", sa), ("settings_b", sb),
                            ("response_a", ra), ("response_b", rb)):
            object.__setattr__(self, name, value)

    @classmethod
    def deterministic(
        cls,
        settings_a: Sequence[float],
        settings_b: Sequence[float],
        lambdas: Sequence,
        weights,
        outcome_a: Callable[[float, object], int],
        outcome_b: Callable[[float, object], int],
    ) -> "LocalCausalModel":
        """Point-mass responses from outcome functions ``A(a, lambda)``, ``B(b, lambda)``."""
        def table(settings, f):
            r = np.zeros((len(settings), len(lambdas), 2))
            for s, angle in enumerate(settings):
                for k, lam in enumerate(lambdas):
                    r[s, k, 0 if f(angle, lam) == 1 else 1] = 1.0
            return r

        return cls(tuple(lambdas), np.asarray(weights, dtype=float), tuple(settings_a), tuple(settings_b),
                   table(settings_a, outcome_a), table(settings_b, outcome_b))

    @classmethod
    def sign_model(cls, settings_a: Sequence[float], settings_b: Sequence[float], n: int = 3600):
        """Midpoint quadrature of the circle sign model with ``n`` hidden-variable angles."""
        lambdas = (np.arange(n) + 0.5) * 2 * np.pi / n
        return cls.deterministic(
            settings_a, settings_b, lambdas.tolist(), np.full(n, 1.0 / n),
            lambda a, lam: _sign(np.cos(a - lam)), lambda b, lam: -_sign(np.cos(b - lam)),
        )

    @classmethod
    def random(cls, rng: np.random.Generator, settings_a, settings_b, n_lambda: int = 8):
        rho = rng.dirichlet(np.ones(n_lambda))
        pa = rng.uniform(size=(len(settings_a), n_lambda))
        pb = rng.uniform(size=(len(settings_b), n_lambda))
        return cls(tuple(range(n_lambda)), rho, tuple(settings_a), tuple(settings_b),
                   np.stack([pa, 1 - pa], axis=-1), np.stack([pb, 1 - pb], axis=-1))

    def full_table(self) -> np.ndarray:
        """``rho(A, B | a, b, lambda)`` with shape ``(n_lambda, n_a, n_b, 2, 2)``."""
        ra = self.response_a.transpose(1, 0, 2)
        rb = self.response_b.transpose(1, 0, 2)
        return ra[:, :, None, :, None] * rb[:, None, :, None, :]


def lhv_correlator(model: LocalCausalModel, angle_a: float, angle_b: float) -> Correlator:
    """``sum_lambda rho(lambda) <A>_{a,lambda} <B>_{b,lambda}``."""
    i = _setting_index(model.settings_a, angle_a)
    k = _setting_index(model.settings_b, angle_b)
    ea = model.response_a[i, :, 0] - model.response_a[i, :, 1]
    eb = model.response_b[k, :, 0] - model.response_b[k, :, 1]
    value = float(np.sum(model.rho_lambda * ea * eb))
    return Correlator(value, float(angle_a), float(angle_b))


def lhv_chsh(model: LocalCausalModel) -> float:
    return _chsh(model.settings_a, model.settings_b, lambda a, b: lhv_correlator(model, a, b).value)


# Table-level predicates on rho(A, B | a, b, lambda), shape (n_lambda, n_a, n_b, 2, 2).


def _table_marginals(table: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return table.sum(axis=4), table.sum(axis=3)


def outcome_independence(table, tol: float | None = None) -> tuple[bool, float]:
    """``rho(A, B | a, b, lambda) = rho(A | a, b, lambda) rho(B | a, b, lambda)``."""
    tol = tolerances.tol_prob(tol)
    table = np.asarray(table, dtype=float)
    pa, pb = _table_marginals(table)
    r = max_abs(table - pa[..., :, None] * pb[..., None, :])
    return r <= tol, r


def parameter_independence(table, tol: float | None = None) -> tuple[bool, float]:
    """``rho(A | a, b, lambda)`` independent of ``b`` and ``rho(B | a, b, lambda)`` independent of ``a``."""
    tol = tolerances.tol_prob(tol)
    pa, pb = _table_marginals(np.asarray(table, dtype=float))
    r = max(_spread(pa, axis=2), _spread(pb, axis=1))
    return r <= tol, r


def local_causality(table, tol: float | None = None) -> tuple[bool, float]:
    """``rho(A, B | a, b, lambda) = rho(A | a, lambda) rho(B | b, lambda)``.

    The local response functions are taken as the single-wing marginals
    averaged over the remote setting; the table factorizes with local
    responses iff it equals their product.
    """
    tol = tolerances.tol_prob(tol)
    table = np.asarray(table, dtype=float)
    pa, pb = _table_marginals(table)
    fa = pa.mean(axis=2)  # (n_lambda, n_a, 2)
    fb = pb.mean(axis=1)  # (n_lambda, n_b, 2)
    prod = fa[:, :, None, :, None] * fb[:, None, :, None, :]
    r = max_abs(table - prod)
    return r <= tol, r


def _sign(x: float) -> int:
    return 1 if x >= 0 else -1


@dataclass(frozen=True)
class DeterministicLHV:
    """Sign model: ``A = sign(a . lambda)``, ``B = -sign(b . lambda)``, ``sign(0) = +1``.

    ``sampler`` is ``"circle"`` (lambda uniform on the unit circle, settings are
    in-plane angles) or ``"sphere"`` (lambda uniform on the unit sphere,
    settings are polar angles in the x-z plane).
    """

    sampler: str = "circle"

    def __post_init__(self):
        if self.sampler not in ("circle", "sphere"):
            raise ValidationError(f"unknown sampler {self.sampler!r}")

    def direction(self, angle: float) -> np.ndarray:
        if self.sampler == "circle":
            return np.array([np.cos(angle), np.sin(angle)])
        return np.array([np.sin(angle), 0.0, np.cos(angle)])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.sampler == "circle":
            phi = rng.uniform(0.0, 2 * np.pi, size=n)
            return np.stack([np.cos(phi), np.sin(phi)], axis=1)
        v = rng.normal(size=(n, 3))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    def outcomes(self, angle_a: float, angle_b: float, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a = np.where(lam @ self.direction(angle_a) >= 0, 1, -1)
        b = -np.where(lam @ self.direction(angle_b) >= 0, 1, -1)
        return a, b


def chunk_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Seed for Monte-Carlo chunk ``index``: ``SeedSequence(seed, spawn_key=(index,))``."""
    return np.random.SeedSequence(int(seed), spawn_key=(int(index),))


def lhv_deterministic_correlator(
    model: DeterministicLHV,
    angle_a: float,
    angle_b: float,
    samples: int,
    seed: int = 0,
    workers: int = 1,
) -> Correlator:
    """Monte-Carlo estimate of ``int d lambda rho(lambda) A(a, lambda) B(b, lambda)``.

    Samples are drawn in chunks of ``MC_CHUNK``; chunk ``k`` uses
    :func:`chunk_seed`, so the estimate does not depend on ``workers``.
    """
    samples = int(samples)
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    starts = list(range(0, samples, MC_CHUNK))

    def run(k: int) -> int:
        n = min(MC_CHUNK, samples - starts[k])
        lam = model.sample(n, np.random.default_rng(chunk_seed(seed, k)))
        a, b = model.outcomes(angle_a, angle_b, lam)
        return int(np.sum(a * b))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(run, range(len(starts))))
    else:
        sums = [run(k) for k in range(len(starts))]
    total = sum(sums)
    mean = total / samples
    # Products are +-1, so the sample variance follows from the mean alone.
    var = (1 - mean * mean) * samples / (samples - 1) if samples > 1 else 0.0
    stderr = float(np.sqrt(max(var, 0.0) / samples))
    return Correlator(float(mean), float(angle_a), float(angle_b), stderr)


def sign_model_correlator(angle_a: float, angle_b: float) -> float:
    """Closed form of the sign model: ``-1 + 2 theta / pi`` for separation ``theta`` in ``[0, pi]``."""
    theta = abs((angle_a - angle_b + np.pi) % (2 * np.pi) - np.pi)
    return -1 + 2 * theta / np.pi
