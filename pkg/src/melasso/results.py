from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class FitResult:
    """Outcome of one penalized fit.

    `tuning_name` is "lambda" for penalized fits and "kappa" for
    ball-constrained ones. `radius` is the l1-ball radius the iterate was
    confined to (kappa for constrained fits, R for the regularized corrected
    lasso, None when unconstrained). `history` holds the objective (or score
    norm, for GLM fits) per iteration.
    """

    beta: np.ndarray
    tuning_name: str
    tuning: float
    intercept: float = 0.0
    iterations: int = 0
    converged: bool = False
    objective: float = float("nan")
    method: str = ""
    radius: float | None = None
    history: np.ndarray = field(default_factory=lambda: np.empty(0))
    diagnostic: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def active_set(self) -> np.ndarray:
        return np.flatnonzero(self.beta)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.beta))

    @property
    def interior(self) -> bool | None:
        if self.radius is None:
            return None
        return bool(np.abs(self.beta).sum() < self.radius * (1 - 1e-8))

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "intercept": float(self.intercept),
            "beta": [float(b) for b in self.beta],
            "tuning": {"name": self.tuning_name, "value": float(self.tuning)},
            "active_set": [int(j) for j in self.active_set],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "objective": float(self.objective),
            "radius": None if self.radius is None else float(self.radius),
            "interior": self.interior,
            "diagnostic": self.diagnostic,
            "extra": {k: _jsonable(v) for k, v in self.extra.items()},
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v
