"""Euclidean projection onto the l1-ball B(kappa) = {x : ||x||_1 <= kappa}.

Sort-based exact threshold (Duchi et al., 2008): sort |v| in decreasing
order, find the largest prefix whose shifted mean stays positive, and
soft-threshold every coordinate at the resulting level. O(p log p).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError


@dataclass(frozen=True)
class L1Ball:
    kappa: float

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValidationError(f"ball radius must be >= 0, got {self.kappa}")

    def project(self, v):
        return project_l1(v, self.kappa)

    def contains(self, v, rtol: float = 1e-12) -> bool:
        return float(np.abs(v).sum()) <= self.kappa * (1 + rtol)


def project_l1(v, kappa: float) -> np.ndarray:
    """Project `v` onto the l1-ball of radius `kappa`.

    Vectors already inside the ball are returned unchanged. Coordinates whose
    magnitude equals the threshold map to exactly 0.0.
    """
    v = np.ascontiguousarray(v, dtype=float)
    if v.ndim != 1:
        raise ValidationError(f"expected a 1-d vector, got shape {v.shape}")
    kappa = float(kappa)
    if not kappa >= 0 or not np.isfinite(kappa):
        raise ValidationError(f"kappa must be finite and >= 0, got {kappa}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("vector to project has non-finite entries")
    if v.size == 0:
        return v.copy()
    return _kernels.project_l1(v, kappa)


def l1_threshold(v, kappa: float) -> float:
    """The soft-threshold level used by `project_l1` (0 when v is inside the ball)."""
    v = np.ascontiguousarray(v, dtype=float)
    if np.abs(v).sum() <= kappa:
        return 0.0
    return float(_kernels.l1_threshold(v, float(kappa)))
