"""Quantum value of the biased Svetlichny expression on GHZ states.

Every party measures in the X-Y plane; the unprimed observable of each
party sits at angle phi0/n and party k's primed observable at
phi_k + phi0/n.  On the GHZ state a product of X-Y plane observables has
expectation cos(sum of angles), so each correlator reduces to
cos(phi0 + sum of phi_k over the primed parties).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ValidationError
from .game_model import CorrelatorExpansion, expand_svetlichny
from .optimize import OptimizerConfig, maximize
from .quantum_chsh import PlanarObservable, expectation, ghz_state

MAX_QUANTUM_PARTIES = 12
MAX_STATEVECTOR_PARTIES = 12
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AngleSet:
    phi0: float
    phi: tuple[float, ...]

    def __post_init__(self):
        values = (self.phi0, *self.phi)
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("angles must be finite")
        object.__setattr__(self, "phi0", float(self.phi0) % TWO_PI)
        object.__setattr__(self, "phi", tuple(float(v) % TWO_PI for v in self.phi))

    @property
    def n(self) -> int:
        return len(self.phi)

    @classmethod
    def from_vector(cls, x) -> "AngleSet":
        x = [float(v) for v in x]
        return cls(x[0], tuple(x[1:]))

    def vector(self) -> np.ndarray:
        return np.array((self.phi0, *self.phi))


@dataclass(frozen=True)
class OptResult:
    n: int
    p: float
    value: float
    angles: AngleSet
    starts_used: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "value": self.value,
            "phi0": self.angles.phi0,
            "phi": list(self.angles.phi),
            "converged": self.converged,
            "starts_used": self.starts_used,
        }


def _check_dims(expansion: CorrelatorExpansion, angles: AngleSet):
    if angles.n != expansion.n:
        raise ValidationError(f"expansion has {expansion.n} parties but {angles.n} angles phi_k were given")


def ghz_objective(expansion: CorrelatorExpansion, angles: AngleSet) -> float:
    """Closed-form GHZ value ``sum_S w_S cos(phi0 + sum_{k in S} phi_k)``."""
    _check_dims(expansion, angles)
    phases = angles.phi0 + expansion.mask_matrix().astype(float) @ np.asarray(angles.phi)
    return float(expansion.coefficients() @ np.cos(phases))


def ghz_objective_statevector(expansion: CorrelatorExpansion, angles: AngleSet) -> float:
    """Same value as :func:`ghz_objective`, by dense tensor expectations on the GHZ state."""
    _check_dims(expansion, angles)
    n = expansion.n
    if n > MAX_STATEVECTOR_PARTIES:
        raise BudgetError(f"state-vector evaluation is limited to n <= {MAX_STATEVECTOR_PARTIES}")
    state = ghz_state(n)
    base = angles.phi0 / n
    unprimed = [PlanarObservable(base, "xy")] * n
    primed = [PlanarObservable(phi + base, "xy") for phi in angles.phi]
    total = 0.0
    for mask, w in expansion.weights.items():
        ops = [primed[k] if mask >> k & 1 else unprimed[k] for k in range(n)]
        total += w * expectation(state, ops)
    return total


def quantum_value_expansion(expansion: CorrelatorExpansion, cfg: OptimizerConfig | None = None) -> OptResult:
    cfg = cfg or OptimizerConfig()
    masks = expansion.mask_matrix().astype(float)
    coeffs = expansion.coefficients()

    def objective(x):
        return float(coeffs @ np.cos(x[0] + masks @ x[1:]))

    res = maximize(objective, expansion.n + 1, cfg)
    angles = AngleSet.from_vector(res.x)
    return OptResult(expansion.n, expansion.p, ghz_objective(expansion, angles), angles, res.starts_used, res.converged)


def quantum_value_svetlichny(n: int, p: float, cfg: OptimizerConfig | None = None) -> OptResult:
    """Best GHZ value of S_n[p] found by multi-start simplex search (a lower bound)."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValidationError(f"n must be an integer, got {n!r}")
    if not 2 <= n <= MAX_QUANTUM_PARTIES:
        raise ValidationError(f"n must lie in [2, {MAX_QUANTUM_PARTIES}], got {n}")
    return quantum_value_expansion(expand_svetlichny(n, p), cfg)


def nonsignaling_value_svetlichny(n: int, p: float) -> float:
    """Largest S_n[p] value over non-signaling behaviors: the sum of |w_S|.

    It is attained by uniform-marginal behaviors whose only nonzero
    correlators are the full ones, each set to sign(w_S); summing out any
    party kills the full-correlator term, so every marginal is uniform.
    """
    return float(np.abs(expand_svetlichny(n, p).coefficients()).sum())
