"""Composite configuration spaces and causal influence between subsystems.

Joint configurations are encoded row-major: the first subsystem is the most
significant digit, matching the order of :func:`unilab.linalg.kron`.

Transition matrices are reshaped into tensors with axes
``(final_1, ..., final_k, initial_1, ..., initial_k)``; every marginal here is a
sum over some of those axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import tolerances
from .errors import DimensionError, ValidationError
from .linalg import as_stochastic, max_abs


@dataclass(frozen=True)
class CompositeSystem:
    labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        dims = tuple(int(d) for d in self.dims)
        if len(labels) != len(dims) or not labels:
            raise ValidationError("labels and dims must be nonempty and of equal length")
        if len(set(labels)) != len(labels):
            raise ValidationError(f"duplicate subsystem labels in {labels}")
        if any(d < 1 for d in dims):
            raise ValidationError(f"subsystem dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown subsystem {label!r}; have {self.labels}") from None

    def axes(self, labels: str | Iterable[str]) -> list[int]:
        if isinstance(labels, str):
            labels = [labels]
        return [self.axis(x) for x in labels]

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "dims": list(self.dims)}


def joint_index(cs: CompositeSystem, configs: Sequence[int]) -> int:
    if len(configs) != len(cs.dims):
        raise IndexError(f"expected {len(cs.dims)} configurations, got {len(configs)}")
    for c, d in zip(configs, cs.dims):
        if not 0 <= c < d:
            raise IndexError(f"configuration {c} out of range for dimension {d}")
    return int(np.ravel_multi_index(tuple(configs), cs.dims))


def joint_unindex(cs: CompositeSystem, index: int) -> tuple[int, ...]:
    if not 0 <= index < cs.dim:
        raise IndexError(f"joint index {index} out of range for dimension {cs.dim}")
    return tuple(int(x) for x in np.unravel_index(index, cs.dims))


def _tensor(cs: CompositeSystem, gamma) -> np.ndarray:
    gamma = as_stochastic(gamma)
    if gamma.shape[0] != cs.dim:
        raise DimensionError(f"transition matrix size {gamma.shape[0]} != joint dimension {cs.dim}")
    return gamma.reshape(cs.dims + cs.dims)


def marginal_conditional(cs: CompositeSystem, gamma, target: str | Sequence[str]) -> np.ndarray:
    """``p(target_t | joint_0)`` with shape ``(d_target, d_joint)``.

    Column ``j`` is the distribution of the target's final configuration
    given initial joint configuration ``j``, summed over all other final
    configurations. A list of labels yields their joint final configuration,
    encoded row-major in the order given.
    """
    axes = cs.axes(target)
    if len(set(axes)) != len(axes):
        raise ValidationError("target labels repeat")
    n = len(cs.dims)
    t = _tensor(cs, gamma)
    drop = tuple(k for k in range(n) if k not in axes)
    t = t.sum(axis=drop)
    # Remaining final axes are in increasing order; put them in requested order.
    kept_sorted = sorted(axes)
    t = np.moveaxis(t, [kept_sorted.index(a) for a in axes], list(range(len(axes))))
    d_target = int(np.prod([cs.dims[a] for a in axes]))
    return t.reshape(d_target, cs.dim)


@dataclass(frozen=True)
class CausalReport:
    source: str
    target: str
    influence: float
    influenced: bool

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "influence": self.influence,
            "influenced": self.influenced,
        }


def causal_influence(
    cs: CompositeSystem,
    gamma,
    source: str,
    target: str,
    tol: float = tolerances.TOL_CAUSAL,
) -> CausalReport:
    """How strongly the target's marginal law depends on the source's initial configuration.

    Influence is the largest total-variation distance between columns of
    :func:`marginal_conditional` that differ only in the source's initial
    configuration. It is 0 exactly when the target's law does not depend on
    the source.
    """
    if source == target:
        raise ValidationError("source and target must differ")
    s = cs.axis(source)
    cond = marginal_conditional(cs, gamma, target)
    t = cond.reshape((cond.shape[0],) + cs.dims)
    t = np.moveaxis(t, 1 + s, 1)
    t = t.reshape(t.shape[0], t.shape[1], -1)
    diff = t[:, :, None, :] - t[:, None, :, :]
    influence = float(0.5 * np.abs(diff).sum(axis=0).max()) if t.shape[1] > 1 else 0.0
    return CausalReport(source, target, influence, influence > tol)


def split_factors(cs: CompositeSystem, gamma, split: tuple[Sequence[str], Sequence[str]]):
    """Candidate factor transition matrices for the two sides of a bipartition."""
    left, right = (cs.axes(side) for side in split)
    if not left or not right:
        raise ValidationError("both sides of the partition must be nonempty")
    if sorted(left + right) != list(range(len(cs.dims))):
        raise ValidationError("partition must cover every subsystem exactly once")
    t = _tensor(cs, gamma)
    factors = []
    for keep, drop in ((left, right), (right, left)):
        # Left with kept final axes (sorted) followed by all n initial axes.
        f = t.sum(axis=tuple(drop))
        init_drop = tuple(len(keep) + k for k in drop)
        f = f.mean(axis=init_drop)
        d = int(np.prod([cs.dims[k] for k in keep]))
        f = _reorder(f, keep).reshape(d, d)
        factors.append(f)
    return factors[0], factors[1]


def _reorder(f: np.ndarray, keep: list[int]) -> np.ndarray:
    k_sorted = sorted(keep)
    m = len(keep)
    perm = [k_sorted.index(k) for k in keep]
    return f.transpose(perm + [m + p for p in perm])


def factorization_check(
    cs: CompositeSystem,
    gamma,
    split: tuple[Sequence[str], Sequence[str]],
    tol: float | None = None,
) -> tuple[bool, float]:
    """Does ``gamma`` equal the tensor product of its two side marginals?

    Side factors come from marginalising ``gamma`` with uniform weight over the
    other side's initial configurations. Returns ``(residual <= tol, residual)``
    with ``residual`` the max-abs entry of the difference.
    """
    tol = tolerances.tol_prob(tol)
    left_f, right_f = split_factors(cs, gamma, split)
    left, right = (cs.axes(side) for side in split)
    n = len(cs.dims)
    dl = [cs.dims[k] for k in left]
    dr = [cs.dims[k] for k in right]
    prod = np.kron(left_f, right_f).reshape(dl + dr + dl + dr)
    order = left + right
    inv = [order.index(k) for k in range(n)]
    prod = prod.transpose(inv + [n + i for i in inv]).reshape(cs.dim, cs.dim)
    residual = max_abs(as_stochastic(gamma) - prod)
    return residual <= tol, residual
