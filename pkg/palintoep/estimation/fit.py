"""Least-squares extrapolation of finite-N moments to N -> infinity"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from palintoep.helper import FitError

# Columns whose scaled R diagonal falls below this are rank-deficient.
RANK_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ExtrapolationFit:
    """value(N) ~ limit + sum_j coefficients[j-1] / N^j."""

    order: int
    limit: float
    coefficients: tuple[float, ...]
    residual: float

    def predict(self, N: float) -> float:
        return self.limit + sum(
            c / N**j for j, c in enumerate(self.coefficients, start=1)
        )

    def to_dict(self) -> dict:
        return {
            'order': self.order,
            'limit': self.limit,
            'coefficients': list(self.coefficients),
            'residual': self.residual,
        }


def default_order(num_points: int) -> int:
    """min(3, points - 2), never below 0."""
    return max(0, min(3, num_points - 2))


def extrapolate(
    points: Sequence[tuple[float, float]],
    order: int | None = None,
    weights: Sequence[float] | None = None,
) -> ExtrapolationFit:
    """Fit the 1/N power model by least squares.

    The design matrix [1, 1/N, ..., 1/N^p] is column-scaled and solved via
    a pivot-free QR factorization; `weights` (typically 1/stderr^2) scale
    the rows by their square roots.
    """
    if order is None:
        order = default_order(len(points))
    if order < 0:
        raise FitError(f"fit order must be >= 0, got {order}")
    needed = order + 2
    if len(points) < needed:
        raise FitError(
            f"need ≥ {needed} rows for a fit of order {order}, "
            f"got {len(points)}"
        )
    sizes = np.array([float(N) for N, _ in points])
    values = np.array([float(v) for _, v in points])
    if len(np.unique(sizes)) != len(sizes):
        raise FitError("dimensions N must be distinct")
    if np.any(sizes <= 0):
        raise FitError("dimensions N must be positive")

    design = (1.0 / sizes[:, None]) ** np.arange(order + 1)[None, :]
    if weights is not None:
        root = np.sqrt(np.asarray(weights, dtype=np.float64))
        if root.shape != sizes.shape or not np.all(np.isfinite(root)):
            raise FitError("weights must be finite, one per point")
        if np.any(root <= 0):
            raise FitError("weights must be positive")
        design = design * root[:, None]
        values = values * root

    scale = np.linalg.norm(design, axis=0)
    scaled = design / scale
    q, r = scipy.linalg.qr(scaled, mode='economic')
    diagonal = np.abs(np.diag(r))
    if diagonal.min() <= RANK_TOLERANCE * diagonal.max():
        raise FitError(
            f"rank-deficient design for order {order}; "
            "the N values are too close together"
        )
    solution = scipy.linalg.solve_triangular(r, q.T @ values) / scale
    residual = float(np.linalg.norm(values - design @ solution))
    return ExtrapolationFit(
        order,
        float(solution[0]),
        tuple(float(c) for c in solution[1:]),
        residual,
    )
