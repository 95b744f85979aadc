"""Seeded multi-start Nelder-Mead maximization."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import ValidationError


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 32
    max_iter: int = 2000
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if int(self.starts) < 1:
            raise ValidationError(f"starts must be >= 1, got {self.starts}")
        if int(self.max_iter) < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if int(self.seed) < 0:
            raise ValidationError(f"seed must be nonnegative, got {self.seed}")

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MultiStartResult:
    x: np.ndarray
    value: float
    converged: bool
    starts_used: int
    best_start: int


def start_point(cfg: OptimizerConfig, index: int, dim: int) -> np.ndarray:
    """Initial point of start ``index``; independent of ``cfg.starts`` so runs nest."""
    rng = np.random.default_rng([cfg.seed, index])
    return rng.uniform(0.0, 2.0 * np.pi, dim)


def _local_search(neg: Callable, x0: np.ndarray, cfg: OptimizerConfig):
    opts = {
        "maxiter": cfg.max_iter,
        "maxfev": 2 * cfg.max_iter,
        "xatol": 1e-7,
        "fatol": cfg.tol,
        "adaptive": x0.size > 4,
    }
    res = minimize(neg, x0, method="Nelder-Mead", options=opts)
    # one restart from the collapsed simplex guards against premature stalls
    res2 = minimize(neg, res.x, method="Nelder-Mead", options=opts)
    converged = bool(res.success and res2.success and res.fun - res2.fun <= 10 * cfg.tol)
    if res2.fun <= res.fun:
        return res2.x, -float(res2.fun), converged
    return res.x, -float(res.fun), converged


def maximize(objective: Callable[[np.ndarray], float], dim: int, cfg: OptimizerConfig) -> MultiStartResult:
    """Maximize ``objective`` over R^dim from ``cfg.starts`` uniform starts in [0, 2pi).

    Ties between starts go to the lowest start index.
    """

    def neg(x):
        return -objective(x)

    best = None
    for i in range(int(cfg.starts)):
        x, value, converged = _local_search(neg, start_point(cfg, i, dim), cfg)
        if best is None or value > best[1]:
            best = (x, value, converged, i)
    x, value, converged, idx = best
    return MultiStartResult(np.asarray(x), value, converged, int(cfg.starts), idx)
