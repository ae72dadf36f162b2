"""Perron-Frobenius data of nonnegative integer matrices by power iteration."""

import logging
from dataclasses import dataclass

import numpy as np

from ..utils.errors import ConvergenceError, DegeneracyError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-12
MAX_ITERATIONS = 10**6


@dataclass(frozen=True)
class EigenMetric:
    """Growth rate and positive eigenvector normalized to sum 1."""

    lam: float
    edge_lengths: tuple[float, ...]
    tolerance: float
    iterations: int

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.edge_lengths, dtype=float)

    def residual(self, matrix: np.ndarray) -> float:
        v = self.vector
        return float(np.max(np.abs(np.asarray(matrix, dtype=float) @ v - self.lam * v)))


def is_primitive_matrix(matrix: np.ndarray) -> bool:
    """Some power up to Wielandt's bound (n-1)^2 + 1 is strictly positive."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or np.any(m < 0):
        return False
    n = m.shape[0]
    pattern = (m > 0).astype(np.int64)
    power = pattern.copy()
    for _ in range((n - 1) ** 2):
        if np.all(power > 0):
            return True
        power = ((power @ pattern) > 0).astype(np.int64)
    return bool(np.all(power > 0))


def growth_rate(
    matrix: np.ndarray,
    tol: float = DEFAULT_TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
) -> EigenMetric:
    """Power iteration from the all-ones vector with Rayleigh-quotient stopping."""
    m = np.asarray(matrix, dtype=float)
    if not is_primitive_matrix(m):
        raise DegeneracyError(
            "not irreducible: train track for a fully irreducible map expected",
            {"matrix": m.astype(int).tolist()},
        )

    v = np.ones(m.shape[0]) / m.shape[0]
    previous = None
    history: list[float] = []
    for iteration in range(1, max_iterations + 1):
        w = m @ v
        lam = float(v @ w) / float(v @ v)
        residual = float(np.max(np.abs(w - lam * v)))
        history.append(lam)
        if (
            previous is not None
            and abs(lam - previous) < tol
            and residual < tol * float(np.max(np.abs(v)))
        ):
            logger.debug(f"Power iteration converged after {iteration} steps: lambda={lam:.12f}")
            return EigenMetric(lam, tuple(float(x) for x in v), tol, iteration)
        previous = lam
        v = w / w.sum()

    raise ConvergenceError(
        f"Power iteration did not converge within {max_iterations} steps",
        history[-10:],
    )
