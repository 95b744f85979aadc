"""Biased two-setting games: inputs, scoring functionals and the
Svetlichny correlator expansion.

Conventions used throughout the package:

* Setting 0 of a party is its *unprimed* observable (A1, B1, C_k), chosen
  with probability p (or q); setting 1 is the *primed* one (A2, B2, C'_k).
* Outcomes are +1/-1.  In bit language outcome +1 is bit 0.
* A subset of parties is a bitmask with party 1 at the lowest bit.  In a
  :class:`CorrelatorExpansion` the mask marks the parties that measure their
  primed observable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError

PRUNE_TOL = 1e-15
MAX_EXPANSION_PARTIES = 16

# Sign of each correlator in the two-party score; the minus sits on (A2, B2).
CHSH_SIGNS = np.array([[1.0, 1.0], [1.0, -1.0]])


def _check_open_probability(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or not 0.0 < value < 1.0:
        raise ValidationError(f"{name} must lie in the open interval (0, 1), got {value!r}")
    return value


def _frozen_array(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ValidationError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BiasPair:
    """Independent setting biases: Alice picks A1 w.p. ``p``, Bob picks B1 w.p. ``q``."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_open_probability("p", self.p))
        object.__setattr__(self, "q", _check_open_probability("q", self.q))

    def joint(self) -> "JointBias":
        return JointBias.product(self.p, self.q)


@dataclass(frozen=True, eq=False)
class JointBias:
    """Joint input distribution ``weights[i, j] = P(x=i, y=j)``."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen_array(self.weights, (2, 2))
        if np.any(w < 0):
            raise ValidationError("joint bias entries must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError(f"joint bias must sum to 1 (sum={w.sum()!r})")
        object.__setattr__(self, "weights", w)

    @classmethod
    def product(cls, p: float, q: float) -> "JointBias":
        p = _check_open_probability("p", p)
        q = _check_open_probability("q", q)
        return cls(np.outer([p, 1 - p], [q, 1 - q]))

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "JointBias":
        """Build from four row-major cells ``P00, P01, P10, P11``."""
        if len(values) != 4:
            raise ValidationError(f"expected 4 cells, got {len(values)}")
        return cls(np.reshape(np.asarray(values, dtype=float), (2, 2)))

    def flat(self) -> list[float]:
        return [float(v) for v in self.weights.ravel()]

    def __eq__(self, other):
        return isinstance(other, JointBias) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(tuple(self.flat()))

    def __repr__(self):
        return f"JointBias({self.flat()})"


@dataclass(frozen=True, eq=False)
class CorrelatorTable:
    """``E[i, j]`` is the expected outcome product of settings ``x=i``, ``y=j``."""

    E: np.ndarray

    def __post_init__(self):
        E = _frozen_array(self.E, (2, 2))
        if np.any(np.abs(E) > 1.0 + 1e-12):
            raise ValidationError("correlators must lie in [-1, 1]")
        object.__setattr__(self, "E", E)

    def __eq__(self, other):
        return isinstance(other, CorrelatorTable) and np.array_equal(self.E, other.E)

    def __hash__(self):
        return hash(tuple(self.E.ravel()))

    def __repr__(self):
        return f"CorrelatorTable({self.E.tolist()})"


def _as_table(corr) -> CorrelatorTable:
    return corr if isinstance(corr, CorrelatorTable) else CorrelatorTable(corr)


def chsh_score(bias: BiasPair, corr) -> float:
    """Expectation-form score of the product-biased CHSH game."""
    if not isinstance(bias, BiasPair):
        raise ValidationError("chsh_score expects a BiasPair")
    E = _as_table(corr).E
    p, q = bias.p, bias.q
    return (
        p * q * E[0, 0]
        + p * (1 - q) * E[0, 1]
        + (1 - p) * q * E[1, 0]
        - (1 - p) * (1 - q) * E[1, 1]
    )


def joint_score(bias: JointBias, corr) -> float:
    if not isinstance(bias, JointBias):
        raise ValidationError("joint_score expects a JointBias")
    E = _as_table(corr).E
    return math.fsum((CHSH_SIGNS * bias.weights * E).ravel())


def expectation_to_success(v: float) -> float:
    """Map a +/-1 game score to the average probability of winning."""
    v = float(v)
    if not math.isfinite(v) or not -1.0 <= v <= 1.0:
        raise ValidationError(f"score must lie in [-1, 1], got {v!r}")
    return (1.0 + v) / 2.0


@dataclass(frozen=True)
class CorrelatorExpansion:
    """Signed weights of an n-party full-correlator expression.

    ``weights[mask]`` multiplies the correlator in which exactly the parties
    in ``mask`` measure their primed observable.
    """

    n: int
    p: float
    weights: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.weights) > 1 << self.n:
            raise ValidationError("more weights than correlators")
        for mask in self.weights:
            if not 0 <= mask < 1 << self.n:
                raise ValidationError(f"mask {mask} out of range for n={self.n}")

    def masks(self) -> np.ndarray:
        return np.fromiter(self.weights.keys(), dtype=np.int64, count=len(self.weights))

    def coefficients(self) -> np.ndarray:
        return np.fromiter(self.weights.values(), dtype=float, count=len(self.weights))

    def mask_matrix(self) -> np.ndarray:
        """Boolean (terms, n) matrix; entry [t, k] is True when party k+1 is primed in term t."""
        return (self.masks()[:, None] >> np.arange(self.n)) & 1 == 1

    def dense(self) -> np.ndarray:
        """Weights as a length 2**n vector indexed by mask."""
        out = np.zeros(1 << self.n)
        out[self.masks()] = self.coefficients()
        return out

    def evaluate(self, unprimed: Sequence[int], primed: Sequence[int]) -> float:
        """Value on a deterministic assignment of +/-1 outcomes."""
        c = np.asarray(unprimed, dtype=float)
        cp = np.asarray(primed, dtype=float)
        if c.shape != (self.n,) or cp.shape != (self.n,):
            raise ValidationError(f"assignments must have length {self.n}")
        chosen = np.where(self.mask_matrix(), cp, c)
        return float(self.coefficients() @ np.prod(chosen, axis=1))

    def to_json(self) -> dict:
        terms = [
            {"primed": [k + 1 for k in range(self.n) if mask >> k & 1], "weight": float(w)}
            for mask, w in sorted(self.weights.items())
        ]
        return {"n": self.n, "p": self.p, "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "CorrelatorExpansion":
        weights = {}
        for term in data["terms"]:
            mask = 0
            for party in term["primed"]:
                mask |= 1 << (int(party) - 1)
            weights[mask] = float(term["weight"])
        return cls(int(data["n"]), float(data["p"]), weights)


def _prime_swap(weights: dict[int, float], full: int) -> dict[int, float]:
    return {mask ^ full: w for mask, w in weights.items()}


def _m2(p: float) -> dict[int, float]:
    # mask bit 0 = party 1 primed, bit 1 = party 2 primed
    return {0b00: 2 * p * p, 0b10: 2 * p * (1 - p), 0b01: 2 * (1 - p) * p, 0b11: -2 * (1 - p) ** 2}


def expand_svetlichny(n: int, p: float) -> CorrelatorExpansion:
    """Expand the biased Svetlichny expression S_n[p] into full correlators.

    The primed partner M'_n is M_n with every C and C' exchanged, the bias
    travelling with its observable (so M'_n[p] is the prime-swap of M_n[1-p]).
    Both are carried through the recursion

        M_{m+1}  = (M_m + M'_m) p C_{m+1} + (M_m - M'_m) (1-p) C'_{m+1}
        M'_{m+1} = (M'_m + M_m) (1-p) C'_{m+1} + (M'_m - M_m) p C_{m+1}

    and S_n is M_n for even n, the average of M_n and M'_n for odd n.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValidationError(f"n must be an integer, got {n!r}")
    n = int(n)
    if not 2 <= n <= MAX_EXPANSION_PARTIES:
        raise ValidationError(f"n must lie in [2, {MAX_EXPANSION_PARTIES}], got {n}")
    p = _check_open_probability("p", p)

    m = _m2(p)
    mp = _prime_swap(_m2(1 - p), 0b11)
    for k in range(2, n):
        bit = 1 << k
        nxt, nxt_p = {}, {}
        for mask in range(bit):
            a, b = m.get(mask, 0.0), mp.get(mask, 0.0)
            nxt[mask] = p * (a + b)
            nxt[mask | bit] = (1 - p) * (a - b)
            nxt_p[mask | bit] = (1 - p) * (b + a)
            nxt_p[mask] = p * (b - a)
        m, mp = nxt, nxt_p

    if n % 2:
        raw = {mask: 0.5 * (m.get(mask, 0.0) + mp.get(mask, 0.0)) for mask in range(1 << n)}
    else:
        raw = m
    weights = {mask: w for mask, w in sorted(raw.items()) if abs(w) >= PRUNE_TOL}
    return CorrelatorExpansion(n, p, weights)
