"""Correlation coefficients and CHSH statistics over any experiment model.

The CHSH combination used here is the standard four-setting statistic
S = E(a,b) - E(a,b') + E(a',b) + E(a',b'); deterministic local-hidden-variable
models keep |S| <= 2 while the quantum prediction reaches 2*sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Angle, JointDistribution, PolarizerSettings, _check_normalized
from .models import ExperimentModel, ObserverView
from .montecarlo import run_trials

_MAX_SEED = 2**64

# Canonical sign placement first; the scan tries all four placements of the
# single minus sign so the convention cannot hide a violation.
CANONICAL_SIGNS = (1.0, -1.0, 1.0, 1.0)
_SIGN_PATTERNS = (
    (1.0, -1.0, 1.0, 1.0),
    (-1.0, 1.0, 1.0, 1.0),
    (1.0, 1.0, -1.0, 1.0),
    (1.0, 1.0, 1.0, -1.0),
)


@dataclass(frozen=True)
class ChshSettings:
    """The four analyzer settings a, a', b, b' of a CHSH run."""

    a: Angle
    a_prime: Angle
    b: Angle
    b_prime: Angle

    @classmethod
    def from_degrees(cls, a: float, a_prime: float, b: float, b_prime: float) -> ChshSettings:
        return cls(
            Angle.from_degrees(a),
            Angle.from_degrees(a_prime),
            Angle.from_degrees(b),
            Angle.from_degrees(b_prime),
        )

    def pairs(self) -> tuple[tuple[Angle, Angle], ...]:
        """Setting pairs in the order (a,b), (a,b'), (a',b), (a',b')."""
        return (
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        )


@dataclass(frozen=True)
class ChshResult:
    """Four correlations and their CHSH combination, with provenance."""

    s_value: float
    correlations: tuple[float, float, float, float]
    settings: ChshSettings
    provenance: str = "analytic"
    signs: tuple[float, float, float, float] = CANONICAL_SIGNS
    trials: int | None = None
    seed: int | None = None
    s_standard_error: float | None = None

    def __post_init__(self) -> None:
        if self.provenance not in ("analytic", "empirical"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for e in self.correlations:
            if abs(e) > 1.0 + 1e-9:
                raise ValueError(f"correlation {e!r} outside [-1, 1]")
        if abs(self.s_value) > 4.0 + 1e-9:
            raise ValueError(f"|S| = {abs(self.s_value)!r} exceeds the algebraic bound 4")


def correlation(dist: JointDistribution) -> float:
    """Outcome correlation E = P(YY) + P(NN) - P(YN) - P(NY), in [-1, 1]."""
    _check_normalized(dist)
    return dist.p_yy + dist.p_nn - dist.p_yn - dist.p_ny


def _model_correlation(model: ExperimentModel, x: Angle, y: Angle) -> float:
    return correlation(model.predict(PolarizerSettings(x, y)).summed)


def _combine(correlations, signs) -> float:
    return (
        signs[0] * correlations[0]
        + signs[1] * correlations[1]
        + signs[2] * correlations[2]
        + signs[3] * correlations[3]
    )


def chsh(model: ExperimentModel, settings: ChshSettings) -> ChshResult:
    """Analytic S = E(a,b) - E(a,b') + E(a',b) + E(a',b') for a model."""
    correlations = tuple(_model_correlation(model, x, y) for x, y in settings.pairs())
    return ChshResult(
        s_value=_combine(correlations, CANONICAL_SIGNS),
        correlations=correlations,
        settings=settings,
    )


def chsh_empirical(
    model: ExperimentModel,
    settings: ChshSettings,
    trials: int,
    seed: int,
    view: ObserverView = ObserverView.A,
) -> ChshResult:
    """CHSH estimate from seeded runs, one per setting pair.

    Pair k runs under seed + k (mod 2^64): distinct counter-stream keys give
    independent randomness while the provenance stays a single integer. The
    standard error of S combines the per-pair errors sqrt((1 - E^2) / n) in
    quadrature.
    """
    if trials < 1:
        raise ValueError("need at least one trial per setting pair")
    correlations = []
    variance = 0.0
    for k, (x, y) in enumerate(settings.pairs()):
        tally = run_trials(
            model, PolarizerSettings(x, y), trials, (seed + k) % _MAX_SEED, view=view
        )
        c_yy, c_yn, c_ny, c_nn = tally.counts
        e = (c_yy + c_nn - c_yn - c_ny) / trials
        correlations.append(e)
        variance += (1.0 - e * e) / trials
    correlations = tuple(correlations)
    return ChshResult(
        s_value=_combine(correlations, CANONICAL_SIGNS),
        correlations=correlations,
        settings=settings,
        provenance="empirical",
        trials=trials,
        seed=seed,
        s_standard_error=math.sqrt(variance),
    )


def chsh_scan(
    model: ExperimentModel,
    resolution_deg: float,
    reduce_symmetry: bool = True,
) -> ChshResult:
    """Exhaustive CHSH maximization over a four-angle grid.

    The grid covers [0, 180) degrees, since every outcome statistic here has
    half-turn period. With reduce_symmetry the first setting is pinned at 0 (a
    common rotation of all four settings leaves each correlation unchanged);
    pass False to brute-force all four axes for validation. All four
    placements of the minus sign are scanned either way. Ties resolve to the
    first maximizing cell in scan order, so concurrent or sequential evaluation
    would report the same winner.
    """
    if not 0.0 < resolution_deg <= 15.0:
        raise ValueError("scan resolution must be in (0, 15] degrees")
    grid_deg = np.arange(0.0, 180.0, resolution_deg)
    m = len(grid_deg)
    grid = [Angle.from_degrees(d) for d in grid_deg]

    e_matrix = np.empty((m, m))
    for i, x in enumerate(grid):
        for j, y in enumerate(grid):
            e_matrix[i, j] = _model_correlation(model, x, y)

    a_indices = (0,) if reduce_symmetry else range(m)
    best_abs = -1.0
    best = None  # (a_idx, pattern, flat index of (a', b, b'), signed S)
    for ai in a_indices:
        e_a = e_matrix[ai]
        for signs in _SIGN_PATTERNS:
            s_cube = (
                signs[0] * e_a[None, :, None]
                + signs[1] * e_a[None, None, :]
                + signs[2] * e_matrix[:, :, None]
                + signs[3] * e_matrix[:, None, :]
            )
            flat = int(np.abs(s_cube).argmax())
            value = float(s_cube.reshape(-1)[flat])
            if abs(value) > best_abs:
                best_abs = abs(value)
                best = (ai, signs, flat, value)

    ai, signs, flat, value = best
    api, bi, bpi = np.unravel_index(flat, (m, m, m))
    settings = ChshSettings(grid[ai], grid[int(api)], grid[int(bi)], grid[int(bpi)])
    correlations = (
        e_matrix[ai, int(bi)],
        e_matrix[ai, int(bpi)],
        e_matrix[int(api), int(bi)],
        e_matrix[int(api), int(bpi)],
    )
    return ChshResult(
        s_value=value,
        correlations=tuple(float(e) for e in correlations),
        settings=settings,
        signs=signs,
    )
