"""Quantum values of the biased CHSH game.

Closed-form bound and region split for product biases, the explicit
maximally entangled strategy achieving it, a dense state-vector
expectation engine, and a numerical search over qubit strategies for
arbitrary joint biases.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .game_model import BiasPair, CorrelatorTable, JointBias, _check_open_probability, chsh_score, joint_score
from .optimize import OptimizerConfig, maximize

TOL_REGION = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class PlanarObservable:
    """+/-1 qubit observable ``cos(angle) X + sin(angle) Z`` (or ``... Y`` for plane "xy")."""

    angle: float
    plane: str = "xz"

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise ValidationError("observable angle must be finite")
        if self.plane not in ("xz", "xy"):
            raise ValidationError(f"plane must be 'xz' or 'xy', got {self.plane!r}")

    @property
    def matrix(self) -> np.ndarray:
        other = Z if self.plane == "xz" else Y
        return math.cos(self.angle) * X + math.sin(self.angle) * other


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        n = amps.size.bit_length() - 1
        if amps.size < 2 or 1 << n != amps.size:
            raise ValidationError(f"state length must be a power of two >= 2, got {amps.size}")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-12:
            raise ValidationError("state must be normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def to_json(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


def ghz_state(n: int) -> PureState:
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(amps)


def bell_state() -> PureState:
    return ghz_state(2)


def schmidt_state(gamma: float) -> PureState:
    """``cos(gamma)|00> + sin(gamma)|11>``."""
    amps = np.zeros(4, dtype=complex)
    amps[0], amps[3] = math.cos(gamma), math.sin(gamma)
    return PureState(amps)


def _matrix(op) -> np.ndarray:
    m = op.matrix if isinstance(op, PlanarObservable) else np.asarray(op, dtype=complex)
    if m.shape != (2, 2):
        raise ValidationError(f"single-qubit operators must be 2x2, got {m.shape}")
    return m


def apply_local(state: PureState, operators: Sequence) -> np.ndarray:
    """``(O_1 x ... x O_n)|psi>`` by contracting each factor on its own axis."""
    n = state.n
    if len(operators) != n:
        raise ValidationError(f"state has {n} qubits but {len(operators)} operators were given")
    psi = state.amplitudes.reshape((2,) * n)
    for k, op in enumerate(operators):
        psi = np.moveaxis(np.tensordot(_matrix(op), psi, axes=([1], [k])), 0, k)
    return psi.reshape(-1)


def expectation(state: PureState, operators: Sequence) -> float:
    """``<psi| O_1 x ... x O_n |psi>``; party 1 is the most significant qubit."""
    value = np.vdot(state.amplitudes, apply_local(state, operators))
    return float(value.real)


def correlator_table(A: Sequence, B: Sequence, state: PureState) -> CorrelatorTable:
    if state.n != 2:
        raise ValidationError("correlator tables need a two-qubit state")
    E = [[expectation(state, [a, b]) for b in B] for a in A]
    return CorrelatorTable(np.clip(E, -1.0, 1.0))


def compute_alpha(B1, B2, state: PureState) -> float:
    """``<psi| I x (B1 B2 + B2 B1) |psi>``."""
    if state.n != 2:
        raise ValidationError("compute_alpha needs a two-qubit state")
    b1, b2 = _matrix(B1), _matrix(B2)
    return expectation(state, [I2, b1 @ b2 + b2 @ b1])


def _check_quadrant(p: float, q: float) -> tuple[float, float]:
    p = _check_open_probability("p", p)
    q = _check_open_probability("q", q)
    if p < 0.5 or q < 0.5:
        raise DomainError("the closed-form bound is stated for p, q >= 1/2; fold the inputs first")
    return p, q


def alpha_ratio(p: float, q: float) -> float:
    sq = q * q + (1 - q) ** 2
    return sq * (p * p - (1 - p) ** 2) / (q * (1 - q) * (p * p + (1 - p) ** 2))


def alpha_max(p: float, q: float) -> float:
    p, q = _check_quadrant(p, q)
    return min(2.0, alpha_ratio(p, q))


def quantum_bound(p: float, q: float, alpha: float) -> float:
    """Upper bound on the biased CHSH score for a given anticommutator value."""
    sq = q * q + (1 - q) ** 2
    t = q * (1 - q) * alpha
    return p * math.sqrt(sq + t) + (1 - p) * math.sqrt(max(sq - t, 0.0))


def tsirelson_biased(p: float, q: float) -> float:
    """Quantum value of the product-biased game for ``1/2 <= p, q < 1``."""
    p, q = _check_quadrant(p, q)
    return quantum_bound(p, q, min(2.0, alpha_ratio(p, q)))


def fold(p: float, q: float) -> tuple[float, float]:
    return max(p, 1.0 - p), max(q, 1.0 - q)


def quantum_value_chsh(p: float, q: float) -> float:
    """Quantum value for any ``0 < p, q < 1`` via the quadrant fold."""
    p = _check_open_probability("p", p)
    q = _check_open_probability("q", q)
    return tsirelson_biased(*fold(p, q))


class Region(str, enum.Enum):
    NO_ADVANTAGE = "NoAdvantage"
    ADVANTAGE = "Advantage"


@dataclass(frozen=True)
class RegionTag:
    region: Region
    r: float
    s: float

    @property
    def advantage(self) -> bool:
        return self.region is Region.ADVANTAGE


def classify_region(p: float, q: float, tol: float = TOL_REGION) -> RegionTag:
    p = _check_open_probability("p", p)
    q = _check_open_probability("q", q)
    r, s = fold(p, q)
    region = Region.ADVANTAGE if r * s < 0.5 - tol else Region.NO_ADVANTAGE
    return RegionTag(region, r, s)


@dataclass(frozen=True)
class QubitStrategy:
    A: tuple[PlanarObservable, PlanarObservable]
    B: tuple[PlanarObservable, PlanarObservable]
    state: PureState

    def correlators(self) -> CorrelatorTable:
        return correlator_table(self.A, self.B, self.state)

    def to_json(self) -> dict:
        return {
            "A": [a.angle for a in self.A],
            "B": [b.angle for b in self.B],
            "plane": self.A[0].plane,
            "state": self.state.to_json(),
        }


def cos_beta(p: float, q: float) -> float:
    return 0.5 * alpha_ratio(p, q)


def optimal_strategy(p: float, q: float) -> QubitStrategy:
    """Maximally entangled strategy attaining the bound where ``pq < 1/2``.

    Region 1 has no genuinely quantum optimum (B1 = B2 there); use
    :func:`biasedgames.classical.classical_value_chsh` for a witness.
    """
    p, q = _check_quadrant(p, q)
    if not classify_region(p, q).advantage:
        raise DomainError(f"(p, q) = ({p}, {q}) has pq >= 1/2; the classical witness is optimal there")
    cb = cos_beta(p, q)
    beta = math.acos(cb)
    sb = math.sin(beta)
    a1 = math.atan2((1 - q) * sb, q + (1 - q) * cb)
    a2 = math.atan2(-(1 - q) * sb, q - (1 - q) * cb)
    return QubitStrategy(
        A=(PlanarObservable(a1), PlanarObservable(a2)),
        B=(PlanarObservable(0.0), PlanarObservable(beta)),
        state=bell_state(),
    )


def strategy_score(p: float, q: float, strategy: QubitStrategy) -> float:
    return chsh_score(BiasPair(p, q), strategy.correlators())


def joint_no_advantage(bias: JointBias, tol: float = TOL_REGION) -> tuple[bool, float]:
    """Test ``1/P00 + 1/P01 + 1/P10 - 1/P11 <= 0`` on the cells sorted descending.

    The game value depends only on the multiset of cell weights, so the
    cells are relabelled largest first before the test.
    """
    if not isinstance(bias, JointBias):
        raise ValidationError("joint_no_advantage expects a JointBias")
    cells = sorted(bias.flat(), reverse=True)
    if cells[-1] <= 0:
        raise ValidationError("every cell must be positive for the advantage condition")
    lhs = 1 / cells[0] + 1 / cells[1] + 1 / cells[2] - 1 / cells[3]
    return lhs <= tol, lhs


def schmidt_correlators(params: np.ndarray) -> np.ndarray:
    """Correlators of planar observables on ``cos(g)|00> + sin(g)|11>``.

    ``params = (g, a1, a2, b1, b2)``; for XZ-plane observables
    ``E_ij = sin(2g) cos(a_i) cos(b_j) + sin(a_i) sin(b_j)``.
    """
    g, a1, a2, b1, b2 = params
    a = np.array([a1, a2])
    b = np.array([b1, b2])
    return math.sin(2 * g) * np.outer(np.cos(a), np.cos(b)) + np.outer(np.sin(a), np.sin(b))


@dataclass(frozen=True)
class OracleResult:
    value: float
    strategy: QubitStrategy
    gamma: float
    converged: bool
    starts_used: int

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "gamma": self.gamma,
            "strategy": self.strategy.to_json(),
            "converged": self.converged,
            "starts_used": self.starts_used,
        }


def quantum_value_joint_oracle(bias: JointBias, cfg: OptimizerConfig | None = None) -> OracleResult:
    """Numerical quantum value of the joint-bias game over two-qubit strategies.

    The search covers a Schmidt-form state and four XZ-plane observables, so
    the result is a lower bound on the quantum value.
    """
    if not isinstance(bias, JointBias):
        raise ValidationError("quantum_value_joint_oracle expects a JointBias")
    cfg = cfg or OptimizerConfig()
    w00, w01, w10, w11 = bias.flat()
    cos, sin = math.cos, math.sin

    # scalar form of schmidt_correlators; this is the hot loop of the search
    def objective(x):
        g, a1, a2, b1, b2 = x
        s = sin(2 * g)
        ca1, ca2, cb1, cb2 = cos(a1), cos(a2), cos(b1), cos(b2)
        sa1, sa2, sb1, sb2 = sin(a1), sin(a2), sin(b1), sin(b2)
        return (
            w00 * (s * ca1 * cb1 + sa1 * sb1)
            + w01 * (s * ca1 * cb2 + sa1 * sb2)
            + w10 * (s * ca2 * cb1 + sa2 * sb1)
            - w11 * (s * ca2 * cb2 + sa2 * sb2)
        )

    res = maximize(objective, 5, cfg)
    g, a1, a2, b1, b2 = (float(v) for v in res.x)
    strategy = QubitStrategy(
        A=(PlanarObservable(a1), PlanarObservable(a2)),
        B=(PlanarObservable(b1), PlanarObservable(b2)),
        state=schmidt_state(g),
    )
    # re-score through the dense engine so the report is self-consistent
    value = joint_score(bias, strategy.correlators())
    return OracleResult(value, strategy, g, res.converged, res.starts_used)
