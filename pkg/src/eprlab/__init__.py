"""Simulation laboratory for paired-polarizer correlation experiments.

Four interchangeable accounts — the textbook quantum prediction, a
deterministic local-hidden-variable baseline, a relativistic balls-and-boxes
construction, and a locally anisotropic-spacetime description — sit behind one
analytic-plus-sampling interface, with a seeded partition-invariant Monte
Carlo engine and CHSH statistics on top.
"""

from .core import (
    PROB_TOL,
    Angle,
    JointDistribution,
    Marginals,
    Outcome,
    PhotonCharge,
    PolarizerSettings,
    WeightedDistribution,
    canonical_radians,
    marginals,
    relative_angle,
    sum_distributions,
)
from .kinematics import (
    AnisotropyParameter,
    Aperture,
    FieldVector,
    FourVector,
    PreferredDirection,
    Velocity,
    angle_to_velocity,
    bogoslovsky_norm_3,
    bogoslovsky_norm_4,
    lorentz_contract,
    observed_aperture,
)
from .models import (
    TRIAL_STRIDE,
    AnisotropicModel,
    BallsBoxesModel,
    BatchOutcomes,
    ExperimentModel,
    LocalHiddenVariableModel,
    ObserverView,
    PredictionSet,
    QuantumModel,
    TrialRecord,
    alignment_probability,
    aniso_pass_probability,
    build_model,
    same_outcome_probability,
)
from .bell import (
    ChshResult,
    ChshSettings,
    chsh,
    chsh_empirical,
    chsh_scan,
    correlation,
)
from .montecarlo import (
    ConvergenceReport,
    EmpiricalDistribution,
    Tally,
    convergence_report,
    merge_tallies,
    run_trials,
    to_empirical,
    trial_uniforms,
)

__version__ = "0.1.0"

__all__ = [
    "PROB_TOL",
    "TRIAL_STRIDE",
    "Angle",
    "AnisotropicModel",
    "AnisotropyParameter",
    "Aperture",
    "BallsBoxesModel",
    "BatchOutcomes",
    "ChshResult",
    "ChshSettings",
    "ConvergenceReport",
    "EmpiricalDistribution",
    "ExperimentModel",
    "FieldVector",
    "FourVector",
    "JointDistribution",
    "LocalHiddenVariableModel",
    "Marginals",
    "ObserverView",
    "Outcome",
    "PhotonCharge",
    "PolarizerSettings",
    "PredictionSet",
    "PreferredDirection",
    "QuantumModel",
    "Tally",
    "TrialRecord",
    "Velocity",
    "WeightedDistribution",
    "alignment_probability",
    "angle_to_velocity",
    "aniso_pass_probability",
    "bogoslovsky_norm_3",
    "bogoslovsky_norm_4",
    "build_model",
    "canonical_radians",
    "chsh",
    "chsh_empirical",
    "chsh_scan",
    "convergence_report",
    "correlation",
    "lorentz_contract",
    "marginals",
    "merge_tallies",
    "observed_aperture",
    "relative_angle",
    "run_trials",
    "same_outcome_probability",
    "sum_distributions",
    "to_empirical",
    "trial_uniforms",
]
