"""Default numerical tolerances.

``tol_prob`` can be overridden process-wide through the ``UNILAB_TOL_PROB``
environment variable; every function that takes a ``tol`` argument falls back
to these values when it is ``None``.
"""

from __future__ import annotations

import os

TOL_PROB = 1e-10
TOL_HERM = 1e-10
TOL_UNITARY = 1e-9
TOL_CAUSAL = 1e-9
TOL_LP = 1e-8
COND_MAX = 1e8

ENV_TOL_PROB = "UNILAB_TOL_PROB"


def tol_prob(override: float | None = None) -> float:
    if override is not None:
        return float(override)
    env = os.environ.get(ENV_TOL_PROB)
    if env:
        return float(env)
    return TOL_PROB


def effective() -> dict[str, float]:
    """All current defaults, with environment overrides applied."""
    return {
        "tol_prob": tol_prob(),
        "tol_herm": TOL_HERM,
        "tol_unitary": TOL_UNITARY,
        "tol_causal": TOL_CAUSAL,
        "tol_lp": TOL_LP,
        "cond_max": COND_MAX,
    }
