"""The four competing accounts of the paired-polarizer experiment.

Every model answers through the same two-part surface: an analytic joint
prediction (optionally split by hidden charge and by observing frame) and a
per-trial sampler fed from an externally supplied block of uniform draws, so
all randomness stays under the caller's control.

Models are immutable once configured and predictions are pure; concurrency of
trial execution is the trial engine's concern.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .core import (
    PROB_TOL,
    Angle,
    JointDistribution,
    Outcome,
    PhotonCharge,
    PolarizerSettings,
    WeightedDistribution,
    relative_angle,
    sum_distributions,
)
from .kinematics import (
    AnisotropyParameter,
    Aperture,
    FieldVector,
    PreferredDirection,
    observed_aperture,
)

# Uniform draws consumed per trial. Fixed across models so that trial i always
# owns block i of the random stream and batching cannot change any outcome.
TRIAL_STRIDE = 4

_TWO_PI = 2.0 * math.pi
_HALF_PI = 0.5 * math.pi
_QUARTER_PI = 0.25 * math.pi

# The source emits the two charges with equal frequency.
CHARGE_WEIGHT = 0.5


class ObserverView(Enum):
    """Whose account of the experiment is being computed.

    A and B are the frames attached to the two analyzers; CHARGE_BLIND is the
    account of someone who cannot resolve the hidden charge and therefore only
    sees the charge-summed distribution (which all views share).
    """

    A = "A"
    B = "B"
    CHARGE_BLIND = "blind"


@dataclass(frozen=True)
class TrialRecord:
    """One emitted pair and what each analyzer reported."""

    outcome_a: Outcome
    outcome_b: Outcome
    charge: PhotonCharge | None = None
    hidden_angle: Angle | None = None


@dataclass(frozen=True)
class BatchOutcomes:
    """Vectorized trial results; arrays are indexed by trial."""

    a_yes: np.ndarray
    b_yes: np.ndarray
    charge_positive: np.ndarray | None = None
    hidden_angle: np.ndarray | None = None


@dataclass(frozen=True)
class PredictionSet:
    """Analytic prediction: charge-summed distribution plus optional per-charge split."""

    summed: JointDistribution
    per_charge: Mapping[PhotonCharge, WeightedDistribution] | None = None

    def __post_init__(self) -> None:
        if self.per_charge is None:
            return
        recombined = sum_distributions(
            self.per_charge[PhotonCharge.POSITIVE],
            self.per_charge[PhotonCharge.NEGATIVE],
        )
        for ours, theirs in zip(self.summed.as_tuple(), recombined.as_tuple()):
            if abs(ours - theirs) > PROB_TOL:
                raise ValueError("summed distribution disagrees with its per-charge parts")


class ExperimentModel(ABC):
    """Common surface of the four experiment models."""

    model_id: str = ""

    @abstractmethod
    def predict(
        self,
        settings: PolarizerSettings,
        view: ObserverView = ObserverView.CHARGE_BLIND,
    ) -> PredictionSet:
        """Analytic joint-outcome distribution under the given observer account."""

    @abstractmethod
    def sample_batch(
        self,
        settings: PolarizerSettings,
        uniforms: np.ndarray,
        view: ObserverView = ObserverView.A,
    ) -> BatchOutcomes:
        """Vectorized trials from an (n, TRIAL_STRIDE) block of uniform draws."""

    def sample(
        self,
        settings: PolarizerSettings,
        uniforms,
        view: ObserverView = ObserverView.A,
    ) -> TrialRecord:
        """One trial from one stride-wide block of uniform draws in [0, 1).

        Delegates to sample_batch so the scalar and vectorized paths can never
        drift apart.
        """
        block = np.asarray(uniforms, dtype=np.float64).reshape(1, TRIAL_STRIDE)
        batch = self.sample_batch(settings, block, view=view)
        charge = None
        if batch.charge_positive is not None:
            charge = (
                PhotonCharge.POSITIVE
                if bool(batch.charge_positive[0])
                else PhotonCharge.NEGATIVE
            )
        hidden = None
        if batch.hidden_angle is not None:
            hidden = Angle(float(batch.hidden_angle[0]))
        return TrialRecord(
            outcome_a=Outcome.YES if bool(batch.a_yes[0]) else Outcome.NO,
            outcome_b=Outcome.YES if bool(batch.b_yes[0]) else Outcome.NO,
            charge=charge,
            hidden_angle=hidden,
        )


def _cos2_sin2(settings: PolarizerSettings) -> tuple[float, float]:
    theta = relative_angle(settings).radians
    c = math.cos(theta)
    s = math.sin(theta)
    return c * c, s * s


def _uniform_block(uniforms) -> np.ndarray:
    u = np.asarray(uniforms, dtype=np.float64)
    if u.ndim != 2 or u.shape[1] != TRIAL_STRIDE:
        raise ValueError(f"uniform block must have shape (n, {TRIAL_STRIDE})")
    return u


def _joint_from_pass(pass_a: float, pass_b: float) -> JointDistribution:
    # The two analyzers fire independently given the charge; the joint cells
    # are plain products.
    return JointDistribution(
        p_yy=pass_a * pass_b,
        p_yn=pass_a * (1.0 - pass_b),
        p_ny=(1.0 - pass_a) * pass_b,
        p_nn=(1.0 - pass_a) * (1.0 - pass_b),
    )


def _sampling_view(view: ObserverView) -> ObserverView:
    # Realizing trials requires a definite per-charge account; A is the
    # narrating observer, so the charge-blind sampler uses A's account (any
    # account yields the same charge-summed statistics).
    return ObserverView.A if view is ObserverView.CHARGE_BLIND else view


class _ChargedPairModel(ExperimentModel):
    """Shared prediction/sampling skeleton for the two hidden-charge models.

    Subclasses provide per-charge (pass at A, pass at B) probabilities for a
    given observer account; everything else follows from the equal-frequency
    charge source and per-box independence.
    """

    def _pass_pair(
        self, settings: PolarizerSettings, view: ObserverView
    ) -> dict[PhotonCharge, tuple[float, float]]:
        raise NotImplementedError

    def predict(
        self,
        settings: PolarizerSettings,
        view: ObserverView = ObserverView.CHARGE_BLIND,
    ) -> PredictionSet:
        account = _sampling_view(view)
        passes = self._pass_pair(settings, account)
        per_charge = {
            charge: WeightedDistribution(CHARGE_WEIGHT, _joint_from_pass(*pair))
            for charge, pair in passes.items()
        }
        summed = sum_distributions(
            per_charge[PhotonCharge.POSITIVE], per_charge[PhotonCharge.NEGATIVE]
        )
        if view is ObserverView.CHARGE_BLIND:
            return PredictionSet(summed)
        return PredictionSet(summed, per_charge)

    def _outcomes_from_charge(
        self,
        settings: PolarizerSettings,
        u: np.ndarray,
        positive: np.ndarray,
        view: ObserverView,
    ) -> tuple[np.ndarray, np.ndarray]:
        passes = self._pass_pair(settings, _sampling_view(view))
        pos_a, pos_b = passes[PhotonCharge.POSITIVE]
        neg_a, neg_b = passes[PhotonCharge.NEGATIVE]
        a_yes = u[:, 1] < np.where(positive, pos_a, neg_a)
        b_yes = u[:, 2] < np.where(positive, pos_b, neg_b)
        return a_yes, b_yes


class QuantumModel(ExperimentModel):
    """Textbook quantum account: undefined polarization at the source, collapse
    at the first analyzer, squared-cosine pass law at the second.

    There is no hidden charge, so only the charge-blind view exists.
    """

    model_id = "qm"

    def predict(
        self,
        settings: PolarizerSettings,
        view: ObserverView = ObserverView.CHARGE_BLIND,
    ) -> PredictionSet:
        if view is not ObserverView.CHARGE_BLIND:
            raise ValueError("the quantum account has no hidden charge to condition on")
        c2, s2 = _cos2_sin2(settings)
        return PredictionSet(
            JointDistribution(0.5 * c2, 0.5 * s2, 0.5 * s2, 0.5 * c2)
        )

    def sample_batch(
        self,
        settings: PolarizerSettings,
        uniforms: np.ndarray,
        view: ObserverView = ObserverView.A,
    ) -> BatchOutcomes:
        u = _uniform_block(uniforms)
        c2, s2 = _cos2_sin2(settings)
        a_yes = u[:, 0] < 0.5
        # Collapsed partner: aligned with A's axis after Yes, orthogonal after No.
        b_yes = u[:, 1] < np.where(a_yes, c2, s2)
        return BatchOutcomes(a_yes=a_yes, b_yes=b_yes)


class BallsBoxesModel(_ChargedPairModel):
    """Classical boxes with charge-filtering tubes.

    Each observer measures their own aperture at its maximum while the other
    box's aperture appears contracted by the relative motion that accompanies
    a relative index angle; pass probabilities are squared aperture fractions.
    The two accounts are mirror images per charge yet share the charge sum.
    """

    model_id = "balls"

    def __init__(self, dy_max: float = 1.0):
        if not dy_max > 0.0:
            raise ValueError(f"dy_max={dy_max!r} must be positive")
        self.dy_max = float(dy_max)

    def _pass_pair(
        self, settings: PolarizerSettings, view: ObserverView
    ) -> dict[PhotonCharge, tuple[float, float]]:
        theta = relative_angle(settings)
        own = Aperture(dy=self.dy_max, dy_max=self.dy_max)
        other = Aperture(dy=observed_aperture(self.dy_max, theta), dy_max=self.dy_max)
        p_own = own.pass_fraction()
        p_other = other.pass_fraction()
        if view is ObserverView.A:
            pos = (p_own, p_other)
        elif view is ObserverView.B:
            pos = (p_other, p_own)  # the mirrored account
        else:
            raise ValueError("per-charge pass probabilities need observer A or B")
        neg = (1.0 - pos[0], 1.0 - pos[1])
        return {PhotonCharge.POSITIVE: pos, PhotonCharge.NEGATIVE: neg}

    def sample_batch(
        self,
        settings: PolarizerSettings,
        uniforms: np.ndarray,
        view: ObserverView = ObserverView.A,
    ) -> BatchOutcomes:
        u = _uniform_block(uniforms)
        positive = u[:, 0] < CHARGE_WEIGHT
        a_yes, b_yes = self._outcomes_from_charge(settings, u, positive, view)
        return BatchOutcomes(a_yes=a_yes, b_yes=b_yes, charge_positive=positive)


def aniso_pass_probability(
    e: FieldVector, nu: PreferredDirection, r: AnisotropyParameter
) -> float:
    """Pass probability of a photon with field e, accounted in the frame whose
    preferred direction is nu: the squared normalized component of e along nu.

    This is the anisotropic-norm probability (
    (norm(e)/|e|)^2 )^(1/r) in its algebraically reduced form; the exponent
    1/r is what cancels the norm's r-dependence, and reducing before
    evaluating makes the cancellation exact in floating point rather than
    merely accurate.
    """
    if not 0.0 < r.r < 1.0:
        raise ValueError(f"the probability definition needs 0 < r < 1, got {r.r!r}")
    mag = e.magnitude
    if mag == 0.0:
        raise ValueError("pass probability needs a nonzero field")
    ratio = e.component_along(nu) / mag
    ratio = max(-1.0, min(1.0, ratio))  # unit-vector rounding guard
    return ratio * ratio


def _perpendicular_in_plane(direction: PreferredDirection) -> PreferredDirection:
    # Quarter-turn in the polarization plane. Built from the same components so
    # the dot with the original direction is exactly zero in floating point.
    nx, ny, _ = direction.nu
    return PreferredDirection((-ny, nx, 0.0))


class AnisotropicModel(_ChargedPairModel):
    """Locally anisotropic-spacetime account.

    Each analyzer's optical axis is the preferred direction of its observer's
    frame. A circularly polarized photon's field stops on its own analyzer's
    axis (positive charge) or on the perpendicular (negative charge), each with
    probability one half over the random starting direction. An observer
    computes every pass probability as the squared normalized field component
    along their own preferred direction, so the two accounts disagree per
    charge while the charge sums coincide.
    """

    model_id = "aniso"

    def __init__(self, r: float | AnisotropyParameter = 0.5):
        param = r if isinstance(r, AnisotropyParameter) else AnisotropyParameter(float(r))
        if not 0.0 < param.r < 1.0:
            raise ValueError(f"the probability definition needs 0 < r < 1, got {param.r!r}")
        self.r = param

    def _pass_pair(
        self, settings: PolarizerSettings, view: ObserverView
    ) -> dict[PhotonCharge, tuple[float, float]]:
        nu_a = PreferredDirection.from_angle(settings.theta_a)
        nu_b = PreferredDirection.from_angle(settings.theta_b)
        if view is ObserverView.A:
            frame = nu_a
        elif view is ObserverView.B:
            frame = nu_b
        else:
            raise ValueError("per-charge pass probabilities need observer A or B")
        fields = {
            PhotonCharge.POSITIVE: (FieldVector.along(nu_a), FieldVector.along(nu_b)),
            PhotonCharge.NEGATIVE: (
                FieldVector.along(_perpendicular_in_plane(nu_a)),
                FieldVector.along(_perpendicular_in_plane(nu_b)),
            ),
        }
        return {
            charge: (
                aniso_pass_probability(e_a, frame, self.r),
                aniso_pass_probability(e_b, frame, self.r),
            )
            for charge, (e_a, e_b) in fields.items()
        }

    def sample_batch(
        self,
        settings: PolarizerSettings,
        uniforms: np.ndarray,
        view: ObserverView = ObserverView.A,
    ) -> BatchOutcomes:
        u = _uniform_block(uniforms)
        # The field's random starting direction; sweeping on, it stops at
        # whichever of axis/perpendicular comes first, so the charge alternates
        # by quadrant and each charge has probability exactly one half.
        hidden = _TWO_PI * u[:, 0]
        positive = (np.floor(4.0 * u[:, 0]).astype(np.int64) % 2) == 1
        a_yes, b_yes = self._outcomes_from_charge(settings, u, positive, view)
        return BatchOutcomes(
            a_yes=a_yes, b_yes=b_yes, charge_positive=positive, hidden_angle=hidden
        )


def _fold_halfturn(delta):
    """Angular distance folded onto [0, pi/2] with half-turn periodicity.

    Works elementwise on floats and numpy arrays alike.
    """
    d = delta % math.pi
    return _HALF_PI - abs(d - _HALF_PI)


class LocalHiddenVariableModel(ExperimentModel):
    """Deterministic local-hidden-variable baseline.

    A shared axis angle lam is drawn uniformly on [0, pi); each analyzer
    answers Yes exactly when its axis lies within pi/4 of lam on the half-turn
    circle. Closed form: with delta the folded relative angle,
    P(YY) = P(NN) = 1/2 - delta/pi and P(YN) = P(NY) = delta/pi.
    Any such model obeys the CHSH bound |S| <= 2; this one saturates it.
    """

    model_id = "lhv"

    def predict(
        self,
        settings: PolarizerSettings,
        view: ObserverView = ObserverView.CHARGE_BLIND,
    ) -> PredictionSet:
        if view is not ObserverView.CHARGE_BLIND:
            raise ValueError("the hidden-variable baseline defines no charge split")
        delta = _fold_halfturn(relative_angle(settings).radians)
        differ = delta / math.pi
        agree = 0.5 - differ
        return PredictionSet(JointDistribution(agree, differ, differ, agree))

    def sample_batch(
        self,
        settings: PolarizerSettings,
        uniforms: np.ndarray,
        view: ObserverView = ObserverView.A,
    ) -> BatchOutcomes:
        u = _uniform_block(uniforms)
        lam = math.pi * u[:, 0]
        a_yes = _fold_halfturn(settings.theta_a.radians - lam) < _QUARTER_PI
        b_yes = _fold_halfturn(settings.theta_b.radians - lam) < _QUARTER_PI
        return BatchOutcomes(a_yes=a_yes, b_yes=b_yes, hidden_angle=lam)


def alignment_probability(settings: PolarizerSettings) -> float:
    """Squared dot product of the two preferred directions, (nu_A . nu_B)^2.

    Predicts the probability that the two analyzers report the same outcome,
    P(Yes,Yes) + P(No,No), from the axis geometry alone.
    """
    nu_a = PreferredDirection.from_angle(settings.theta_a)
    nu_b = PreferredDirection.from_angle(settings.theta_b)
    d = nu_a.dot(nu_b)
    return d * d


def same_outcome_probability(dist: JointDistribution) -> float:
    """P(Yes,Yes) + P(No,No): the probability of matching reports."""
    return dist.p_yy + dist.p_nn


def build_model(name: str, r: float = 0.5) -> ExperimentModel:
    """Construct a model from its short identifier: qm, balls, aniso, or lhv."""
    if name == "qm":
        return QuantumModel()
    if name == "balls":
        return BallsBoxesModel()
    if name == "aniso":
        return AnisotropicModel(r)
    if name == "lhv":
        return LocalHiddenVariableModel()
    raise ValueError(f"unknown model {name!r}")
