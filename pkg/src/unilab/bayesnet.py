"""Directed conditional probabilities over finite categorical variables.

A :class:`ConditionalTable` is a nomological law ``p(child | parents)``; a
:class:`JointDistribution` is a contingent distribution over named variables.
Conditionals obtained by Bayesian inversion of a joint
(:func:`reversed_conditional`) depend on the contingent parent distribution,
unlike the tables they were built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import tolerances
from .errors import ValidationError, ZeroSupportError


def _names(x: str | Sequence[str]) -> tuple[str, ...]:
    return (x,) if isinstance(x, str) else tuple(x)


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities over the product space of ``variables``; ``probs.shape`` gives cardinalities."""

    variables: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self):
        variables = _names(self.variables)
        probs = np.array(self.probs, dtype=float)
        if len(set(variables)) != len(variables):
            raise ValidationError(f"duplicate variables {variables}")
        if probs.ndim != len(variables):
            raise ValidationError(f"probs has {probs.ndim} axes for {len(variables)} variables")
        tol = tolerances.tol_prob()
        if probs.min(initial=0.0) < -tol or abs(probs.sum() - 1) > tol:
            raise ValidationError("joint probabilities must be nonnegative and sum to 1")
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        probs.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "probs", probs)

    @property
    def cardinalities(self) -> dict[str, int]:
        return dict(zip(self.variables, self.probs.shape))

    def axis(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}; have {self.variables}") from None

    def marginal(self, names: str | Sequence[str]) -> "JointDistribution":
        """Distribution over ``names``, axes in the order given."""
        names = _names(names)
        axes = [self.axis(n) for n in names]
        drop = tuple(k for k in range(len(self.variables)) if k not in axes)
        p = self.probs.sum(axis=drop)
        kept = sorted(axes)
        p = np.moveaxis(p, [kept.index(a) for a in axes], list(range(len(axes))))
        return JointDistribution(names, p)

    @classmethod
    def independent(cls, **marginals) -> "JointDistribution":
        names = tuple(marginals)
        p = np.ones(())
        for n in names:
            p = np.multiply.outer(p, np.asarray(marginals[n], dtype=float))
        return cls(names, p)

    def to_dict(self) -> dict:
        return {"variables": list(self.variables), "probs": self.probs.tolist()}


@dataclass(frozen=True)
class ConditionalTable:
    """``table[b, c, ..., a] = p(child = a | parents = (b, c, ...))``."""

    child: str
    parents: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        parents = _names(self.parents)
        table = np.array(self.table, dtype=float)
        if self.child in parents:
            raise ValidationError(f"{self.child!r} cannot be its own parent")
        if table.ndim != len(parents) + 1:
            raise ValidationError(f"table has {table.ndim} axes for {len(parents)} parents plus child")
        tol = tolerances.tol_prob()
        if table.min() < -tol or table.max() > 1 + tol:
            raise ValidationError("conditional probabilities must lie in [0, 1]")
        if np.max(np.abs(table.sum(axis=-1) - 1)) > tol:
            raise ValidationError("each conditional distribution must sum to 1")
        table = np.clip(table, 0.0, None)
        table /= table.sum(axis=-1, keepdims=True)
        table.setflags(write=False)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "table", table)

    @property
    def cardinalities(self) -> dict[str, int]:
        return dict(zip(self.parents + (self.child,), self.table.shape))

    def to_dict(self) -> dict:
        return {"child": self.child, "parents": list(self.parents), "rows": self.table.tolist()}


def _aligned_parents(ct: ConditionalTable, parent_joint: JointDistribution) -> np.ndarray:
    if set(parent_joint.variables) != set(ct.parents) or len(parent_joint.variables) != len(ct.parents):
        raise ValidationError(
            f"parent joint covers {parent_joint.variables}, table needs {ct.parents}"
        )
    p = parent_joint.marginal(ct.parents).probs
    if p.shape != ct.table.shape[:-1]:
        raise ValidationError(f"parent cardinalities {p.shape} != table {ct.table.shape[:-1]}")
    return p


def propagate_multilinear(ct: ConditionalTable, parent_joint: JointDistribution) -> np.ndarray:
    """``p(a) = sum_{b,c,...} p(a | b, c, ...) p(b, c, ...)``."""
    p = _aligned_parents(ct, parent_joint)
    k = p.ndim
    return np.tensordot(p, ct.table, axes=(list(range(k)), list(range(k))))


def build_joint(ct: ConditionalTable, parent_joint: JointDistribution) -> JointDistribution:
    """``p(a, b, c, ...) = p(a | b, c, ...) p(b, c, ...)`` over ``(child,) + parents``."""
    p = _aligned_parents(ct, parent_joint)
    joint = ct.table * p[..., None]
    return JointDistribution((ct.child,) + ct.parents, np.moveaxis(joint, -1, 0))


def reversed_conditional(
    joint: JointDistribution, child: str, conditioning: str | Sequence[str]
) -> ConditionalTable:
    """Derived table ``p(child | conditioning)`` obtained by marginalising and dividing.

    Every conditioning cell must have nonzero probability, otherwise
    :class:`ZeroSupportError` is raised.
    """
    conditioning = _names(conditioning)
    if child in conditioning:
        raise ValidationError(f"{child!r} appears among its own conditioning variables")
    m = joint.marginal(conditioning + (child,)).probs
    denom = m.sum(axis=-1, keepdims=True)
    zero = np.argwhere(denom[..., 0] <= 0.0)
    if zero.size:
        cell = dict(zip(conditioning, (int(x) for x in zero[0])))
        raise ZeroSupportError(f"p({cell}) = 0; conditional undefined")
    return ConditionalTable(child, conditioning, m / denom)


def reversed_conditional_at(
    joint: JointDistribution,
    child: str,
    assignment: Mapping[str, int],
) -> np.ndarray:
    """``p(child | assignment)`` for a single conditioning cell."""
    names = tuple(assignment)
    m = joint.marginal(names + (child,)).probs
    row = m[tuple(int(assignment[n]) for n in names)]
    total = row.sum()
    if total <= 0.0:
        raise ZeroSupportError(f"p({dict(assignment)}) = 0; conditional undefined")
    return row / total


@dataclass(frozen=True)
class ReichenbachReport:
    correlated: bool
    factorizes_given_c: bool
    max_residual: float
    correlation: float
    skipped: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "correlated": self.correlated,
            "factorizes_given_c": self.factorizes_given_c,
            "max_residual": self.max_residual,
            "correlation": self.correlation,
            "skipped_c_values": list(self.skipped),
        }


def reichenbach_test(
    joint: JointDistribution, a: str, b: str, c: str | Sequence[str], tol: float | None = None
) -> ReichenbachReport:
    """Are ``a`` and ``b`` correlated, and does conditioning on ``c`` screen the correlation off?

    ``c`` may be several variables, treated as one compound variable. Values of
    ``c`` with zero probability are skipped and listed in ``skipped``.
    """
    tol = tolerances.tol_prob(tol)
    cs = _names(c)
    m = joint.marginal((a, b) + cs).probs
    m = m.reshape(m.shape[0], m.shape[1], -1)
    pab = m.sum(axis=2)
    correlation = float(np.max(np.abs(pab - np.outer(pab.sum(axis=1), pab.sum(axis=0)))))
    residual = 0.0
    skipped = []
    for k in range(m.shape[2]):
        pc = m[:, :, k].sum()
        if pc <= 0.0:
            skipped.append(k)
            continue
        cond = m[:, :, k] / pc
        r = np.max(np.abs(cond - np.outer(cond.sum(axis=1), cond.sum(axis=0))))
        residual = max(residual, float(r))
    return ReichenbachReport(correlation > tol, residual <= tol, residual, correlation, tuple(skipped))


@dataclass(frozen=True)
class BayesNetwork:
    """Named variables with one conditional table each (roots have no parents)."""

    cardinalities: Mapping[str, int]
    tables: tuple[ConditionalTable, ...]

    def __post_init__(self):
        cards = {str(k): int(v) for k, v in dict(self.cardinalities).items()}
        tables = tuple(self.tables)
        children = [t.child for t in tables]
        if sorted(children) != sorted(cards):
            raise ValidationError("every variable needs exactly one conditional table")
        for t in tables:
            for name, card in t.cardinalities.items():
                if cards.get(name) != card:
                    raise ValidationError(f"table for {t.child!r} disagrees on cardinality of {name!r}")
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "tables", tables)
        self.order()

    def table(self, child: str) -> ConditionalTable:
        for t in self.tables:
            if t.child == child:
                return t
        raise KeyError(child)

    def order(self) -> list[str]:
        """Topological order of the variables; cycles are rejected."""
        done: list[str] = []
        pending = {t.child: set(t.parents) for t in self.tables}
        while pending:
            ready = sorted(v for v, ps in pending.items() if ps <= set(done))
            if not ready:
                raise ValidationError(f"directed cycle among {sorted(pending)}")
            done.extend(ready)
            for v in ready:
                del pending[v]
        return done

    def joint(self) -> JointDistribution:
        """Product of all tables, by exhaustive enumeration over the variables."""
        names = tuple(self.order())
        p = np.ones([self.cardinalities[n] for n in names])
        for t in self.tables:
            axes = [names.index(v) for v in t.parents + (t.child,)]
            shape = [1] * len(names)
            for ax in axes:
                shape[ax] = self.cardinalities[names[ax]]
            order = np.argsort(axes)
            p = p * t.table.transpose(order).reshape(shape)
        return JointDistribution(names, p)
