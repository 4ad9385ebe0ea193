"""Criterion weights from a pairwise comparison matrix, with Saaty's consistency test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NonReciprocalMatrixError

# Risk criteria in weight order: population, property, environment, other.
CRITERIA = ("population", "property", "environment", "other")

# Expert scoring of the four risk criteria.  The Others/Environment entry is
# 2 (Others moderately more important), which is the value that reproduces the
# published eigenpair; the printed table repeats 1/2 on both sides.
DEFAULT_PCM = (
    (1.0, 2.0, 7.0, 5.0),
    (1 / 2, 1.0, 5.0, 3.0),
    (1 / 7, 1 / 5, 1.0, 1 / 2),
    (1 / 5, 1 / 3, 2.0, 1.0),
)

# Saaty's random index by matrix order.
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49}

CI_THRESHOLD = 0.1


@dataclass(frozen=True, eq=False)
class PairwiseMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise NonReciprocalMatrixError(f"need a square matrix of order >= 2, got shape {a.shape}")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise NonReciprocalMatrixError("entries must be finite and positive")
        if np.any(np.abs(np.diag(a) - 1.0) > 1e-9):
            raise NonReciprocalMatrixError("diagonal must be 1")
        gap = np.abs(a.T - 1.0 / a)
        if np.any(gap > 1e-9):
            i, j = np.unravel_index(np.argmax(gap), gap.shape)
            raise NonReciprocalMatrixError(f"entries[{i}][{j}]={a[i, j]} but entries[{j}][{i}]={a[j, i]}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def order_n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class AhpResult:
    weights: tuple[float, ...]
    lambda_max: float
    consistency_index: float
    consistent: bool
    # CI / RI, informational only; 0 when RI is 0 (orders 1 and 2)
    consistency_ratio: float
    iterations: int


def derive_weights(pcm, tol: float = 1e-10, max_iter: int = 1000) -> AhpResult:
    """Principal eigenvector of ``pcm`` by power iteration from the uniform vector.

    Accepts a :class:`PairwiseMatrix` or anything array-like.  Raises
    :class:`ConvergenceFailure` if successive iterates still differ by more than
    ``tol`` after ``max_iter`` steps.
    """
    if not isinstance(pcm, PairwiseMatrix):
        pcm = PairwiseMatrix(pcm)
    a = pcm.entries
    n = pcm.order_n
    x = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        y = a @ x
        y /= y.sum()
        if np.max(np.abs(y - x)) < tol:
            x = y
            break
        x = y
    else:
        raise ConvergenceFailure(f"power iteration did not converge in {max_iter} iterations")
    # x sums to 1, so the Rayleigh-style estimate reduces to the sum of A x
    lam = float((a @ x).sum())
    ci = (lam - n) / (n - 1)
    ri = RANDOM_INDEX.get(n, 1.49)
    return AhpResult(
        weights=tuple(float(v) for v in x),
        lambda_max=lam,
        consistency_index=ci,
        consistent=ci < CI_THRESHOLD,
        consistency_ratio=ci / ri if ri > 0 else 0.0,
        iterations=it,
    )


def default_weights() -> AhpResult:
    return derive_weights(DEFAULT_PCM)
