"""Seeded, partition-invariant Monte Carlo engine with convergence diagnostics.

Trial i always consumes counter block i of a Philox stream keyed by the run
seed, so splitting a run across any number of workers or batch sizes yields a
bitwise-identical merged tally. Tally merging is associative and commutative.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.random import Generator, Philox
from scipy import stats

from .core import JointDistribution, PhotonCharge, PolarizerSettings
from .models import TRIAL_STRIDE, BatchOutcomes, ExperimentModel, ObserverView

_MAX_SEED = 2**64
# One Philox counter step emits exactly four 64-bit words, i.e. four uniform
# doubles; a stride-4 trial therefore owns exactly one counter block.
_PHILOX_DRAWS_PER_BLOCK = 4


def _check_seed(seed: int) -> None:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < _MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")


def trial_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform draws for trials [start, start + count): one stride block each."""
    _check_seed(seed)
    if start < 0 or count < 0:
        raise ValueError("trial range must be non-negative")
    bit_gen = Philox(key=int(seed))
    if start:
        bit_gen.advance(start * TRIAL_STRIDE // _PHILOX_DRAWS_PER_BLOCK)
    return Generator(bit_gen).random((count, TRIAL_STRIDE))


@dataclass(frozen=True)
class Tally:
    """Counts of the four joint outcomes (YY, YN, NY, NN) from a seeded run."""

    counts: tuple[int, int, int, int]
    n: int
    seed: int
    model_id: str
    per_charge_counts: Mapping[PhotonCharge, tuple[int, int, int, int]] | None = None

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 4 or any(c < 0 for c in counts):
            raise ValueError(f"counts must be four non-negative integers, got {self.counts!r}")
        if sum(counts) != self.n:
            raise ValueError(f"counts sum to {sum(counts)}, expected n={self.n}")
        object.__setattr__(self, "counts", counts)
        if self.per_charge_counts is not None:
            per_charge = {
                charge: tuple(int(c) for c in cells)
                for charge, cells in self.per_charge_counts.items()
            }
            for cell in range(4):
                split_total = sum(cells[cell] for cells in per_charge.values())
                if split_total != counts[cell]:
                    raise ValueError("per-charge counts do not add up to the totals")
            object.__setattr__(self, "per_charge_counts", per_charge)


def merge_tallies(first: Tally, second: Tally) -> Tally:
    """Combine sub-tallies of one run; associative and commutative."""
    if first.model_id != second.model_id or first.seed != second.seed:
        raise ValueError("can only merge tallies from the same model and seed")
    if (first.per_charge_counts is None) != (second.per_charge_counts is None):
        raise ValueError("cannot merge charge-split and charge-blind tallies")
    per_charge = None
    if first.per_charge_counts is not None:
        per_charge = {
            charge: tuple(
                a + b
                for a, b in zip(first.per_charge_counts[charge], second.per_charge_counts[charge])
            )
            for charge in first.per_charge_counts
        }
    return Tally(
        counts=tuple(a + b for a, b in zip(first.counts, second.counts)),
        n=first.n + second.n,
        seed=first.seed,
        model_id=first.model_id,
        per_charge_counts=per_charge,
    )


def _cell_indices(batch: BatchOutcomes) -> np.ndarray:
    # Cell order YY, YN, NY, NN: index 3 - 2a - b.
    a = batch.a_yes.astype(np.int64)
    b = batch.b_yes.astype(np.int64)
    return 3 - 2 * a - b


def _tally_batch(batch: BatchOutcomes, model_id: str, seed: int) -> Tally:
    idx = _cell_indices(batch)
    counts = np.bincount(idx, minlength=4)
    per_charge = None
    if batch.charge_positive is not None:
        pos = batch.charge_positive
        per_charge = {
            PhotonCharge.POSITIVE: tuple(int(c) for c in np.bincount(idx[pos], minlength=4)),
            PhotonCharge.NEGATIVE: tuple(int(c) for c in np.bincount(idx[~pos], minlength=4)),
        }
    return Tally(
        counts=tuple(int(c) for c in counts),
        n=len(idx),
        seed=seed,
        model_id=model_id,
        per_charge_counts=per_charge,
    )


def _spans(n: int, workers: int) -> list[tuple[int, int]]:
    base, extra = divmod(n, workers)
    spans = []
    lo = 0
    for w in range(workers):
        hi = lo + base + (1 if w < extra else 0)
        if hi > lo:
            spans.append((lo, hi))
        lo = hi
    return spans


def run_trials(
    model: ExperimentModel,
    settings: PolarizerSettings,
    n: int,
    seed: int,
    view: ObserverView = ObserverView.A,
    workers: int = 1,
    batch_size: int = 1 << 20,
) -> Tally:
    """Run n seeded trials of a model and tally the joint outcomes.

    Workers and batch size only partition the trial-index range; because each
    trial owns a fixed block of the counter-based stream, the merged tally is
    bitwise independent of both, and of scheduling.
    """
    if n < 1:
        raise ValueError("need at least one trial")
    if workers < 1:
        raise ValueError("need at least one worker")
    if batch_size < 1:
        raise ValueError("batch size must be positive")
    _check_seed(seed)

    def tally_span(span: tuple[int, int]) -> Tally:
        lo, hi = span
        part = None
        for start in range(lo, hi, batch_size):
            stop = min(start + batch_size, hi)
            uniforms = trial_uniforms(seed, start, stop - start)
            batch = model.sample_batch(settings, uniforms, view=view)
            piece = _tally_batch(batch, model.model_id, seed)
            part = piece if part is None else merge_tallies(part, piece)
        return part

    spans = _spans(n, workers)
    if len(spans) == 1:
        parts = [tally_span(spans[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(tally_span, spans))
    merged = parts[0]
    for part in parts[1:]:
        merged = merge_tallies(merged, part)
    return merged


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Frequency estimates with per-cell binomial standard errors."""

    estimates: JointDistribution
    standard_errors: tuple[float, float, float, float]
    n: int


def to_empirical(tally: Tally) -> EmpiricalDistribution:
    """Cell frequencies and their standard errors sqrt(p_hat (1 - p_hat) / n)."""
    n = tally.n
    estimates = tuple(c / n for c in tally.counts)
    errors = tuple(math.sqrt(p * (1.0 - p) / n) for p in estimates)
    return EmpiricalDistribution(JointDistribution(*estimates), errors, n)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-cell z-scores against an analytic prediction plus a chi-square summary.

    Cells whose analytic probability is exactly 0 or 1 carry no z-score: they
    are checked exactly, and any violation is an impossible event (a hard
    failure, not a statistical fluctuation).
    """

    z_scores: tuple[float | None, float | None, float | None, float | None]
    impossible: tuple[bool, bool, bool, bool]
    chi_square: float
    dof: int
    p_value: float

    @property
    def has_impossible_event(self) -> bool:
        return any(self.impossible)


def convergence_report(
    analytic: JointDistribution, empirical: EmpiricalDistribution
) -> ConvergenceReport:
    """Compare empirical frequencies against an analytic distribution.

    z-scores use the analytic standard error sqrt(p (1 - p) / n); the
    chi-square statistic runs over cells with positive analytic probability
    and has (number of such cells - 1) degrees of freedom.
    """
    n = empirical.n
    z_scores: list[float | None] = []
    impossible: list[bool] = []
    chi_square = 0.0
    positive_cells = 0
    for p, p_hat in zip(analytic.as_tuple(), empirical.estimates.as_tuple()):
        if p == 0.0 or p == 1.0:
            z_scores.append(None)
            impossible.append(p_hat != p)
        else:
            se = math.sqrt(p * (1.0 - p) / n)
            z_scores.append((p_hat - p) / se)
            impossible.append(False)
        if p > 0.0:
            positive_cells += 1
            chi_square += n * (p_hat - p) ** 2 / p
    dof = positive_cells - 1
    p_value = float(stats.chi2.sf(chi_square, dof)) if dof > 0 else 1.0
    return ConvergenceReport(
        z_scores=tuple(z_scores),
        impossible=tuple(impossible),
        chi_square=chi_square,
        dof=dof,
        p_value=p_value,
    )
