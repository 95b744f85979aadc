"""Exact classical optima by enumerating local deterministic strategies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError, ValidationError
from .game_model import (
    CorrelatorExpansion,
    CorrelatorTable,
    JointBias,
    _check_open_probability,
    expand_svetlichny,
    joint_score,
)

MAX_CLASSICAL_PARTIES = 12
_CHUNK = 1 << 20


@dataclass(frozen=True)
class DeterministicStrategy:
    """Fixed +/-1 outcomes per party: ``outcomes[k] = (unprimed, primed)``."""

    outcomes: tuple[tuple[int, int], ...]

    def __post_init__(self):
        outs = tuple((int(u), int(v)) for u, v in self.outcomes)
        for pair in outs:
            if pair[0] not in (1, -1) or pair[1] not in (1, -1):
                raise ValidationError(f"deterministic outcomes must be +/-1, got {pair}")
        object.__setattr__(self, "outcomes", outs)

    @property
    def n(self) -> int:
        return len(self.outcomes)

    @classmethod
    def from_index(cls, index: int, n: int) -> "DeterministicStrategy":
        """Decode an enumeration index.

        Bit 2k holds party k+1's unprimed outcome, bit 2k+1 its primed
        outcome; a zero bit is outcome +1.
        """
        if not 0 <= index < 1 << (2 * n):
            raise ValidationError(f"index {index} out of range for n={n}")
        return cls(
            tuple(
                (1 - 2 * (index >> (2 * k) & 1), 1 - 2 * (index >> (2 * k + 1) & 1))
                for k in range(n)
            )
        )

    def index(self) -> int:
        idx = 0
        for k, (u, v) in enumerate(self.outcomes):
            idx |= (u == -1) << (2 * k) | (v == -1) << (2 * k + 1)
        return idx

    def correlator_table(self) -> CorrelatorTable:
        if self.n != 2:
            raise ValidationError("correlator tables are defined for two parties")
        a, b = self.outcomes
        return CorrelatorTable(np.outer(a, b))

    def score(self, expansion: CorrelatorExpansion) -> float:
        if expansion.n != self.n:
            raise ValidationError(f"strategy has {self.n} parties, expansion has {expansion.n}")
        unprimed = [u for u, _ in self.outcomes]
        primed = [v for _, v in self.outcomes]
        return expansion.evaluate(unprimed, primed)

    def to_json(self) -> list[list[int]]:
        return [[u, v] for u, v in self.outcomes]


def classical_value_chsh(bias: JointBias) -> tuple[float, DeterministicStrategy]:
    """Best joint-bias score over the 16 deterministic two-party strategies."""
    if not isinstance(bias, JointBias):
        raise ValidationError("classical_value_chsh expects a JointBias")
    best_value, best = -np.inf, None
    for idx in range(16):
        strategy = DeterministicStrategy.from_index(idx, 2)
        value = joint_score(bias, strategy.correlator_table())
        if value > best_value:
            best_value, best = value, strategy
    return best_value, best


def classical_closed_form(p: float, q: float) -> float:
    """Classical optimum ``1 - 2(1-p)(1-q)``, valid for ``1/2 <= p, q < 1``."""
    p = _check_open_probability("p", p)
    q = _check_open_probability("q", q)
    if p < 0.5 or q < 0.5:
        raise DomainError("closed-form classical value needs p, q >= 1/2; use enumeration")
    return 1.0 - 2.0 * (1.0 - p) * (1.0 - q)


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalized transform ``out[d] = sum_S values[S] * (-1)**popcount(S & d)``."""
    out = np.array(values, dtype=float)
    size = out.size
    h = 1
    while h < size:
        view = out.reshape(-1, 2, h)
        lo, hi = view[:, 0, :].copy(), view[:, 1, :]
        view[:, 0, :] += hi
        view[:, 1, :] = lo - hi
        h *= 2
    return out


def _parity(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    par = np.zeros_like(x)
    while np.any(x):
        par ^= x & 1
        x >>= 1
    return par


def strategy_values(expansion: CorrelatorExpansion, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Scores of strategies ``start..stop-1`` in enumeration order.

    A deterministic strategy with unprimed outcomes c_k and primed c'_k
    scores ``prod(c) * f(d)`` where ``d_k = c_k c'_k`` and ``f`` is the
    Walsh-Hadamard transform of the weights, so every score is looked up
    rather than re-summed.
    """
    n = expansion.n
    stop = 1 << (2 * n) if stop is None else stop
    f = walsh_hadamard(expansion.dense())
    idx = np.arange(start, stop, dtype=np.int64)
    u = np.zeros_like(idx)
    v = np.zeros_like(idx)
    for k in range(n):
        u |= (idx >> (2 * k) & 1) << k
        v |= (idx >> (2 * k + 1) & 1) << k
    sign = 1 - 2 * _parity(u)
    return sign * f[u ^ v]


def classical_value_svetlichny(n: int, p: float) -> tuple[float, DeterministicStrategy]:
    """Maximum of S_n[p] over all 4**n deterministic strategies."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValidationError(f"n must be an integer, got {n!r}")
    if n > MAX_CLASSICAL_PARTIES:
        raise BudgetError(
            f"classical enumeration is limited to n <= {MAX_CLASSICAL_PARTIES} (4**n strategies), got n={n}"
        )
    expansion = expand_svetlichny(n, p)
    return classical_value_expansion(expansion)


def classical_value_expansion(expansion: CorrelatorExpansion) -> tuple[float, DeterministicStrategy]:
    total = 1 << (2 * expansion.n)
    best_value, best_idx = -np.inf, -1
    for start in range(0, total, _CHUNK):
        values = strategy_values(expansion, start, min(start + _CHUNK, total))
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value, best_idx = float(values[k]), start + k
    witness = DeterministicStrategy.from_index(best_idx, expansion.n)
    # report the direct sum so re-scoring the witness is bit-identical
    return witness.score(expansion), witness
