"""Two-party binary behaviors, the non-signaling polytope and round simulation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classical import DeterministicStrategy
from .errors import ValidationError
from .game_model import CorrelatorTable, JointBias, joint_score
from .quantum_chsh import PureState, apply_local, _matrix

NS_TOL = 1e-12
_PARITY = np.array([[1.0, -1.0], [-1.0, 1.0]])  # (-1)**(a xor b), indexed [a, b]


@dataclass(frozen=True, eq=False)
class BehaviorTable:
    """Conditional distribution ``probs[x, y, a, b] = P(ab|xy)``."""

    probs: np.ndarray

    def __post_init__(self):
        P = np.array(self.probs, dtype=float)
        if P.shape == (4, 4):
            P = P.reshape(2, 2, 2, 2)
        if P.shape != (2, 2, 2, 2):
            raise ValidationError(f"behavior must have shape (2,2,2,2) or (4,4), got {P.shape}")
        if np.any(P < -NS_TOL):
            raise ValidationError("behavior has negative probabilities")
        if np.max(np.abs(P.sum(axis=(2, 3)) - 1.0)) > NS_TOL:
            raise ValidationError("each P(.|xy) must sum to 1")
        alice = P.sum(axis=3)  # [x, y, a]
        bob = P.sum(axis=2)  # [x, y, b]
        if np.max(np.abs(alice[:, 0] - alice[:, 1])) > NS_TOL or np.max(np.abs(bob[0] - bob[1])) > NS_TOL:
            raise ValidationError("behavior is signaling")
        P.setflags(write=False)
        object.__setattr__(self, "probs", P)

    def correlators(self) -> CorrelatorTable:
        E = np.einsum("xyab,ab->xy", self.probs, _PARITY)
        return CorrelatorTable(np.clip(E, -1.0, 1.0))

    def score(self, bias: JointBias) -> float:
        return joint_score(bias, self.correlators())

    def to_json(self) -> list[list[float]]:
        """Rows are settings (x, y), columns outcomes (a, b), both row-major."""
        return self.probs.reshape(4, 4).tolist()

    def __eq__(self, other):
        return isinstance(other, BehaviorTable) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(tuple(self.probs.ravel()))


def _bit(outcome: int) -> int:
    return 0 if outcome == 1 else 1


def deterministic_behavior(strategy: DeterministicStrategy) -> BehaviorTable:
    if strategy.n != 2:
        raise ValidationError("deterministic behaviors are two-party")
    (a0, a1), (b0, b1) = strategy.outcomes
    P = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product(range(2), repeat=2):
        P[x, y, _bit((a0, a1)[x]), _bit((b0, b1)[y])] = 1.0
    return BehaviorTable(P)


def pr_variant(alpha: int, beta: int, gamma: int) -> BehaviorTable:
    """Uniform mixture over outcomes with ``a xor b = xy xor alpha x xor beta y xor gamma``."""
    P = np.zeros((2, 2, 2, 2))
    for x, y, a in itertools.product(range(2), repeat=3):
        b = a ^ (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma
        P[x, y, a, b] = 0.5
    return BehaviorTable(P)


def pr_box() -> BehaviorTable:
    return pr_variant(0, 0, 0)


def ns_vertices() -> list[BehaviorTable]:
    """The 24 extreme points: 16 deterministic (enumeration order) then 8 PR variants."""
    local = [deterministic_behavior(DeterministicStrategy.from_index(i, 2)) for i in range(16)]
    boxes = [pr_variant(al, be, ga) for al, be, ga in itertools.product(range(2), repeat=3)]
    return local + boxes


def ns_value(bias: JointBias) -> tuple[float, BehaviorTable]:
    """Maximum score over the non-signaling polytope, attained at a vertex."""
    if not isinstance(bias, JointBias):
        raise ValidationError("ns_value expects a JointBias")
    best_value, best = -np.inf, None
    for vertex in ns_vertices():
        value = vertex.score(bias)
        if value > best_value:
            best_value, best = value, vertex
    return best_value, best


def behavior_from_correlators(corr) -> BehaviorTable:
    """Uniform-marginal behavior ``P(ab|xy) = (1 + (-1)**(a xor b) E_xy) / 4``."""
    E = corr.E if isinstance(corr, CorrelatorTable) else CorrelatorTable(corr).E
    P = (1.0 + E[:, :, None, None] * _PARITY[None, None]) / 4.0
    return BehaviorTable(P)


def behavior_from_strategy(A: Sequence, B: Sequence, state: PureState) -> BehaviorTable:
    """Exact outcome distribution of two +/-1 qubit observables per party."""
    if state.n != 2:
        raise ValidationError("behavior_from_strategy needs a two-qubit state")
    I2 = np.eye(2)
    P = np.zeros((2, 2, 2, 2))
    for x, y, a, b in itertools.product(range(2), repeat=4):
        proj_a = (I2 + (1 - 2 * a) * _matrix(A[x])) / 2
        proj_b = (I2 + (1 - 2 * b) * _matrix(B[y])) / 2
        P[x, y, a, b] = np.vdot(state.amplitudes, apply_local(state, [proj_a, proj_b])).real
    P = np.clip(P, 0.0, None)
    return BehaviorTable(P / P.sum(axis=(2, 3), keepdims=True))


@dataclass(frozen=True)
class SimulationReport:
    empirical_score: float
    conditional: list[list[float | None]]
    counts: list[list[int]]
    seed: int
    rounds: int

    def correlators(self) -> CorrelatorTable | None:
        if any(v is None for row in self.conditional for v in row):
            return None
        return CorrelatorTable(self.conditional)

    def to_json(self) -> dict:
        return {
            "counts": self.counts,
            "conditionals": self.conditional,
            "empirical_score": self.empirical_score,
            "rounds": self.rounds,
            "seed": self.seed,
        }


def simulate_rounds(behavior: BehaviorTable, bias: JointBias, rounds: int, seed: int) -> SimulationReport:
    """Play ``rounds`` rounds and tally per-setting outcome products.

    Each round consumes two uniforms from a PCG64 stream seeded with
    ``seed``: the first picks (x, y) and the second (a, b), both by inverse
    CDF over four cells in row-major order.  Rounds score +1 on a win and -1
    otherwise; a setting pair never drawn gets ``None`` as its correlator.
    """
    if int(rounds) < 1:
        raise ValidationError(f"rounds must be >= 1, got {rounds}")
    if int(seed) < 0:
        raise ValidationError(f"seed must be nonnegative, got {seed}")
    rounds = int(rounds)
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    u = rng.random((rounds, 2))

    setting_cdf = np.cumsum(bias.flat())
    setting = np.minimum(np.searchsorted(setting_cdf, u[:, 0], side="right"), 3)
    outcome_cdf = np.cumsum(behavior.probs.reshape(4, 4), axis=1)
    outcome = np.empty(rounds, dtype=np.int64)
    for s in range(4):
        sel = setting == s
        outcome[sel] = np.minimum(np.searchsorted(outcome_cdf[s], u[sel, 1], side="right"), 3)

    x, y = setting >> 1, setting & 1
    a, b = outcome >> 1, outcome & 1
    product = 1 - 2 * (a ^ b)
    win = (a ^ b) == (x & y)

    counts = np.bincount(setting, minlength=4).reshape(2, 2)
    sums = np.bincount(setting, weights=product, minlength=4).reshape(2, 2)
    conditional = [
        [float(sums[i, j] / counts[i, j]) if counts[i, j] else None for j in range(2)] for i in range(2)
    ]
    score = float(np.mean(np.where(win, 1.0, -1.0)))
    return SimulationReport(score, conditional, counts.tolist(), int(seed), rounds)

