"""Parameter scans, advantage thresholds and figure data."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .classical import classical_value_chsh, classical_value_svetlichny
from .errors import ThresholdError, ValidationError
from .game_model import JointBias
from .nonsignaling import ns_value
from .optimize import OptimizerConfig
from .quantum_chsh import classify_region, quantum_value_chsh
from .svetlichny import quantum_value_svetlichny

GAP_TOL = 1e-5  # optimizer-backed comparisons
CLOSED_FORM_TOL = 1e-9
COARSE_POINTS = 101


@dataclass(frozen=True)
class ScanRow:
    p: float
    classical: float
    quantum: float
    ns: float | None
    advantage: bool
    q: float | None = None
    n: int | None = None
    converged: bool = True

    @property
    def gap(self) -> float:
        return self.quantum - self.classical


def region_scan(grid_steps: int) -> list[ScanRow]:
    """Classical, quantum and non-signaling values on the grid ``k / grid_steps``.

    Endpoints are excluded, so ``grid_steps - 1`` points per axis.
    """
    if int(grid_steps) < 2:
        raise ValidationError(f"grid_steps must be >= 2, got {grid_steps}")
    axis = [k / grid_steps for k in range(1, grid_steps)]
    rows = []
    for p in axis:
        for q in axis:
            bias = JointBias.product(p, q)
            classical, _ = classical_value_chsh(bias)
            quantum = quantum_value_chsh(p, q)
            ns, _ = ns_value(bias)
            rows.append(ScanRow(p=p, q=q, classical=classical, quantum=quantum, ns=ns,
                                advantage=classify_region(p, q).advantage))
    return rows


def svetlichny_point(n: int, p: float, cfg: OptimizerConfig) -> ScanRow:
    classical, _ = classical_value_svetlichny(n, p)
    opt = quantum_value_svetlichny(n, p, cfg)
    return ScanRow(p=p, n=n, classical=classical, quantum=opt.value, ns=None,
                   advantage=opt.value - classical > GAP_TOL, converged=opt.converged)


def svetlichny_curves(n: int, p_grid: Sequence[float], cfg: OptimizerConfig | None = None) -> list[ScanRow]:
    cfg = cfg or OptimizerConfig()
    return [svetlichny_point(n, float(p), cfg) for p in sorted(p_grid)]


def coarse_grid() -> np.ndarray:
    return np.linspace(0.5, 1.0, COARSE_POINTS, endpoint=False)


def threshold_p_star(n: int, tol_p: float = 1e-4, cfg: OptimizerConfig | None = None) -> float:
    """Bias above which the n-party quantum value no longer beats the classical one.

    Locates the largest coarse-grid crossing of ``gap - GAP_TOL`` from
    positive to non-positive and bisects it down to ``tol_p``.  The scan runs
    from the top of the grid, so the first positive point found already
    brackets the largest crossing.
    """
    if not math.isfinite(tol_p) or tol_p < 1e-6:
        raise ValidationError(f"tol_p must be >= 1e-6, got {tol_p}")
    cfg = cfg or OptimizerConfig()

    def excess(p: float) -> float:
        row = svetlichny_point(n, p, cfg)
        return row.gap - GAP_TOL

    grid = coarse_grid()
    hi = None
    for p in grid[::-1]:
        if excess(float(p)) > 0:
            lo = float(p)
            break
        hi = float(p)
    else:
        raise ThresholdError(f"no quantum advantage anywhere on [0.5, 1) for n={n}")
    if hi is None:
        raise ThresholdError(f"quantum advantage persists up to p={lo} for n={n}; no crossing below 1")

    while hi - lo > tol_p:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def thresholds_vs_n(n_max: int, cfg: OptimizerConfig | None = None, tol_p: float = 1e-4,
                    n_min: int = 3) -> list[tuple[int, float]]:
    if not 3 <= n_max <= 12:
        raise ValidationError(f"n_max must lie in [3, 12], got {n_max}")
    return [(n, threshold_p_star(n, tol_p, cfg)) for n in range(n_min, n_max + 1)]


REGION_HEADER = ["p", "q", "classical", "quantum", "ns", "gap", "advantage"]
CURVES_HEADER = ["n", "p", "classical", "quantum", "gap", "converged"]
THRESHOLDS_HEADER = ["n", "p_star", "tol_p"]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(header: Sequence[str], records: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_fmt(v) for v in rec])
    return buf.getvalue()


def region_csv(rows: Sequence[ScanRow]) -> str:
    return _csv(REGION_HEADER, ((r.p, r.q, r.classical, r.quantum, r.ns, r.gap, r.advantage) for r in rows))


def curves_csv(rows: Sequence[ScanRow]) -> str:
    return _csv(CURVES_HEADER, ((r.n, r.p, r.classical, r.quantum, r.gap, r.converged) for r in rows))


def thresholds_csv(series: Sequence[tuple[int, float]], tol_p: float) -> str:
    return _csv(THRESHOLDS_HEADER, ((n, p_star, tol_p) for n, p_star in series))
