"""Dense matrix foundation: validation, tensor products, partial traces and
Hermitian exponentials.

Matrices are plain ``numpy`` arrays. Validators return a cleaned copy (never a
view of the input) so callers can treat results as immutable values.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import tolerances
from .errors import DimensionError, ValidationError

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def _square(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def is_unitary(m, tol: float = tolerances.TOL_UNITARY) -> bool:
    """True iff ``max|m^dagger m - I| <= tol``."""
    m = _square(m)
    return max_abs(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def is_hermitian(m, tol: float = tolerances.TOL_HERM) -> bool:
    m = _square(m)
    return max_abs(m - m.conj().T) <= tol


def require_unitary(m, tol: float = tolerances.TOL_UNITARY, name: str = "matrix") -> np.ndarray:
    m = _square(m, name).astype(complex)
    if not is_unitary(m, tol):
        raise ValidationError(f"{name} is not unitary within {tol:g}")
    return m


def require_hermitian(m, tol: float = tolerances.TOL_HERM, name: str = "matrix") -> np.ndarray:
    m = _square(m, name).astype(complex)
    if not is_hermitian(m, tol):
        raise ValidationError(f"{name} is not Hermitian within {tol:g}")
    return m


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    if not factors:
        raise DimensionError("kron needs at least one factor")
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f))
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionError(f"dims {dims} do not multiply to matrix size {m.shape[0]}")
    return dims


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists subsystem dimensions in tensor order and ``keep`` holds the
    indices of the factors to retain. Kept factors stay in their original
    relative order.
    """
    m = _square(m)
    dims = _check_dims(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = m.reshape(dims + dims)
    # Trace discarded factors from the highest index down so axis numbers stay valid.
    current = n
    for k in reversed(range(n)):
        if k in keep:
            continue
        t = np.trace(t, axis1=k, axis2=k + current)
        current -= 1
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of an operator.

    The result acts on factors ``order[0], order[1], ...`` in that sequence, so
    ``permute_subsystems(kron(a, b), (da, db), (1, 0)) == kron(b, a)``.
    """
    m = _square(m)
    dims = _check_dims(m, dims)
    order = tuple(int(k) for k in order)
    if sorted(order) != list(range(len(dims))):
        raise DimensionError(f"order {order} is not a permutation of {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(list(order) + [n + k for k in order])
    return t.reshape(m.shape)


def operator_schmidt_values(m, d_left: int, d_right: int) -> np.ndarray:
    """Singular values of the realigned operator.

    An operator on a ``d_left * d_right`` space is a single tensor product
    ``X (x) Y`` iff at most one value is nonzero.
    """
    m = _square(m)
    if m.shape[0] != d_left * d_right:
        raise DimensionError(f"{d_left}x{d_right} split does not match size {m.shape[0]}")
    t = m.reshape(d_left, d_right, d_left, d_right).transpose(0, 2, 1, 3)
    return np.linalg.svd(t.reshape(d_left * d_left, d_right * d_right), compute_uv=False)


def herm_expm(h, t: float, tol: float = tolerances.TOL_HERM) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` (units with hbar = 1).

    Computed from the eigendecomposition ``h = V diag(w) V^dagger`` so the
    result is unitary up to rounding.
    """
    h = require_hermitian(h, tol, "Hamiltonian")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(-1j * w * float(t))) @ v.conj().T


def _clean_columns(m: np.ndarray, tol: float, what: str) -> np.ndarray:
    if np.min(m) < -tol:
        raise ValidationError(f"{what} has entry {np.min(m):.3g} below -{tol:g}")
    sums = m.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > tol:
        raise ValidationError(f"{what} sums deviate from 1 by {np.max(np.abs(sums - 1.0)):.3g}")
    out = np.where(m < 0, 0.0, m)
    return out / out.sum(axis=0)


def as_probability_vector(p, tol: float | None = None) -> np.ndarray:
    """Validate a probability vector, clamping negatives within ``tol``."""
    tol = tolerances.tol_prob(tol)
    p = np.asarray(p)
    if np.iscomplexobj(p):
        if max_abs(p.imag) > tol:
            raise ValidationError("probability vector has imaginary parts")
        p = p.real
    p = np.array(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DimensionError(f"probability vector must be 1-d and nonempty, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValidationError("probability vector has non-finite entries")
    return _clean_columns(p[:, None], tol, "probability vector")[:, 0]


def as_stochastic(m, tol: float | None = None) -> np.ndarray:
    """Validate a column-stochastic matrix, clamping negatives within ``tol``."""
    tol = tolerances.tol_prob(tol)
    m = _square(m, "stochastic matrix")
    if np.iscomplexobj(m):
        if max_abs(m.imag) > tol:
            raise ValidationError("stochastic matrix has imaginary parts")
        m = m.real
    return _clean_columns(np.array(m, dtype=float), tol, "stochastic matrix")


def is_stochastic(m, tol: float | None = None) -> bool:
    try:
        as_stochastic(m, tol)
    except ValidationError:
        return False
    return True


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_stochastic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Column-stochastic matrix with uniform (Dirichlet(1)) columns."""
    return rng.dirichlet(np.ones(n), size=n).T
