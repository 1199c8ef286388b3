"""The four experiment accounts: analytic predictions, equivalences, samplers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eprlab.core import (
    Angle,
    JointDistribution,
    Outcome,
    PhotonCharge,
    PolarizerSettings,
    marginals,
)
from eprlab.kinematics import AnisotropyParameter, FieldVector, PreferredDirection, bogoslovsky_norm_3
from eprlab.models import (
    TRIAL_STRIDE,
    AnisotropicModel,
    BallsBoxesModel,
    LocalHiddenVariableModel,
    ObserverView,
    PredictionSet,
    QuantumModel,
    alignment_probability,
    aniso_pass_probability,
    build_model,
    same_outcome_probability,
)
from eprlab.core import WeightedDistribution
from eprlab.montecarlo import trial_uniforms

from .oracles import LHV_P_YY_AT_45_DEG, lhv_joint_by_grid

TOL = 1e-12

R_VALUES = (0.1, 0.25, 0.5, 0.75, 0.9)

degree_angles = st.floats(min_value=-360.0, max_value=360.0, allow_nan=False)


def qm_expected(theta_deg):
    c2 = math.cos(math.radians(theta_deg)) ** 2
    s2 = math.sin(math.radians(theta_deg)) ** 2
    return (0.5 * c2, 0.5 * s2, 0.5 * s2, 0.5 * c2)


def grid_settings(step_deg=1.0, lo=-90.0, hi=90.0):
    count = int(round((hi - lo) / step_deg))
    for k in range(count + 1):
        yield PolarizerSettings.from_degrees(lo + k * step_deg, 0.0)


class TestQuantumModel:
    def test_equal_settings(self):
        d = QuantumModel().predict(PolarizerSettings.from_degrees(0.0, 0.0)).summed
        assert d.as_tuple() == (0.5, 0.0, 0.0, 0.5)

    def test_thirty_degrees(self):
        d = QuantumModel().predict(PolarizerSettings.from_degrees(30.0, 0.0)).summed
        assert d.as_tuple() == pytest.approx((0.375, 0.125, 0.125, 0.375), abs=TOL)

    def test_ninety_degrees(self):
        d = QuantumModel().predict(PolarizerSettings.from_degrees(90.0, 0.0)).summed
        assert d.as_tuple() == pytest.approx((0.0, 0.5, 0.5, 0.0), abs=TOL)

    def test_only_charge_blind_view(self):
        m = QuantumModel()
        with pytest.raises(ValueError):
            m.predict(PolarizerSettings.from_degrees(0.0, 0.0), view=ObserverView.A)

    def test_no_charge_split(self):
        pred = QuantumModel().predict(PolarizerSettings.from_degrees(10.0, 0.0))
        assert pred.per_charge is None

    def test_marginals_on_grid(self):
        m = QuantumModel()
        for s in grid_settings():
            marg = marginals(m.predict(s).summed)
            assert marg.p_a_yes == pytest.approx(0.5, abs=TOL)
            assert marg.p_b_yes == pytest.approx(0.5, abs=TOL)


class TestBallsBoxesModel:
    def test_per_charge_view_a_at_sixty(self):
        pred = BallsBoxesModel().predict(
            PolarizerSettings.from_degrees(60.0, 0.0), view=ObserverView.A
        )
        positive = pred.per_charge[PhotonCharge.POSITIVE]
        negative = pred.per_charge[PhotonCharge.NEGATIVE]
        assert positive.weight == 0.5
        assert negative.weight == 0.5
        assert positive.dist.as_tuple() == pytest.approx((0.25, 0.75, 0.0, 0.0), abs=TOL)
        assert negative.dist.as_tuple() == pytest.approx((0.0, 0.0, 0.75, 0.25), abs=TOL)

    def test_per_charge_view_b_is_mirrored(self):
        pred = BallsBoxesModel().predict(
            PolarizerSettings.from_degrees(60.0, 0.0), view=ObserverView.B
        )
        positive = pred.per_charge[PhotonCharge.POSITIVE]
        assert positive.dist.as_tuple() == pytest.approx((0.25, 0.0, 0.75, 0.0), abs=TOL)

    def test_summed_matches_quantum_on_grid(self):
        balls = BallsBoxesModel()
        qm = QuantumModel()
        for s in grid_settings(step_deg=5.0):
            for view in ObserverView:
                got = balls.predict(s, view=view).summed.as_tuple()
                want = qm.predict(s).summed.as_tuple()
                assert got == pytest.approx(want, abs=TOL)

    def test_summed_identical_across_views(self):
        for s in grid_settings(step_deg=7.0):
            a = BallsBoxesModel().predict(s, view=ObserverView.A).summed
            b = BallsBoxesModel().predict(s, view=ObserverView.B).summed
            assert a.as_tuple() == b.as_tuple()  # bitwise

    def test_charge_blind_has_no_split(self):
        pred = BallsBoxesModel().predict(PolarizerSettings.from_degrees(30.0, 0.0))
        assert pred.per_charge is None

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            BallsBoxesModel(dy_max=0.0)

    def test_wider_boxes_same_probabilities(self):
        s = PolarizerSettings.from_degrees(40.0, 5.0)
        narrow = BallsBoxesModel(1.0).predict(s, view=ObserverView.A)
        wide = BallsBoxesModel(3.0).predict(s, view=ObserverView.A)
        for charge in PhotonCharge:
            assert wide.per_charge[charge].dist.as_tuple() == pytest.approx(
                narrow.per_charge[charge].dist.as_tuple(), abs=TOL
            )


class TestAnisoPassProbability:
    def test_aligned_field_always_passes(self):
        nu = PreferredDirection.from_angle(Angle(0.3))
        e = FieldVector.along(nu)
        assert aniso_pass_probability(e, nu, AnisotropyParameter(0.5)) == 1.0

    def test_sixty_degree_case(self):
        nu = PreferredDirection((1.0, 0.0, 0.0))
        e = FieldVector.along(PreferredDirection.from_angle(Angle.from_degrees(60.0)))
        assert aniso_pass_probability(e, nu, AnisotropyParameter(0.5)) == pytest.approx(
            0.25, abs=TOL
        )

    def test_r_cancels_exactly(self):
        nu = PreferredDirection((1.0, 0.0, 0.0))
        e = FieldVector.along(PreferredDirection.from_angle(Angle.from_degrees(37.0)))
        values = {
            aniso_pass_probability(e, nu, AnisotropyParameter(r)) for r in R_VALUES
        }
        assert len(values) == 1  # bitwise identical

    @pytest.mark.parametrize("r", R_VALUES)
    def test_matches_norm_route(self, r):
        # Dual route: squared-component shortcut against the anisotropic-norm
        # evaluation ((norm^2 / |e|^2) ** (1/r)).
        nu = PreferredDirection((1.0, 0.0, 0.0))
        param = AnisotropyParameter(r)
        for deg in range(0, 91, 9):
            e = FieldVector.along(PreferredDirection.from_angle(Angle.from_degrees(deg)), 1.7)
            norm = bogoslovsky_norm_3(e, nu, param)
            mag2 = e.magnitude**2
            via_norm = (norm * norm / mag2) ** (1.0 / r)
            direct = aniso_pass_probability(e, nu, param)
            assert direct == pytest.approx(via_norm, abs=TOL)

    def test_rejects_bad_exponent(self):
        nu = PreferredDirection((1.0, 0.0, 0.0))
        e = FieldVector((1.0, 0.0, 0.0))
        for bad in (0.0, -0.5):
            with pytest.raises(ValueError):
                aniso_pass_probability(e, nu, AnisotropyParameter(bad))

    def test_rejects_zero_field(self):
        nu = PreferredDirection((1.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            aniso_pass_probability(FieldVector((0.0, 0.0, 0.0)), nu, AnisotropyParameter(0.5))


class TestAnisotropicModel:
    def test_equal_settings_per_charge_is_exact(self):
        pred = AnisotropicModel().predict(
            PolarizerSettings.from_degrees(0.0, 0.0), view=ObserverView.A
        )
        assert pred.per_charge[PhotonCharge.POSITIVE].dist.as_tuple() == (1.0, 0.0, 0.0, 0.0)
        assert pred.per_charge[PhotonCharge.NEGATIVE].dist.as_tuple() == (0.0, 0.0, 0.0, 1.0)

    def test_view_a_positive_charge_structure(self):
        # The accounting observer's own analyzer passes its aligned photon
        # surely; the other side contributes the squared cosine.
        theta = 40.0
        pred = AnisotropicModel().predict(
            PolarizerSettings.from_degrees(theta, 0.0), view=ObserverView.A
        )
        weighted_p_yy = (
            pred.per_charge[PhotonCharge.POSITIVE].weight
            * pred.per_charge[PhotonCharge.POSITIVE].dist.p_yy
        )
        assert weighted_p_yy == pytest.approx(
            0.5 * math.cos(math.radians(theta)) ** 2, abs=TOL
        )

    def test_summed_matches_quantum_for_all_r(self):
        qm = QuantumModel()
        for r in R_VALUES:
            model = AnisotropicModel(r)
            for s in grid_settings(step_deg=7.0):
                for view in ObserverView:
                    got = model.predict(s, view=view).summed.as_tuple()
                    want = qm.predict(s).summed.as_tuple()
                    assert got == pytest.approx(want, abs=TOL)

    def test_r_independence_is_bitwise(self):
        reference = None
        for r in R_VALUES:
            model = AnisotropicModel(r)
            outputs = []
            for s in grid_settings(step_deg=15.0):
                pred = model.predict(s, view=ObserverView.A)
                outputs.append(
                    (
                        pred.summed.as_tuple(),
                        pred.per_charge[PhotonCharge.POSITIVE].dist.as_tuple(),
                        pred.per_charge[PhotonCharge.NEGATIVE].dist.as_tuple(),
                    )
                )
            if reference is None:
                reference = outputs
            else:
                assert outputs == reference

    def test_rejects_exponent_outside_unit_interval(self):
        for bad in (0.0, 1.0, -0.3, 1.5):
            with pytest.raises(ValueError):
                AnisotropicModel(bad)

    def test_accepts_parameter_object(self):
        assert AnisotropicModel(AnisotropyParameter(0.25)).r.r == 0.25


class TestObserverRelativity:
    @pytest.mark.parametrize("model", [BallsBoxesModel(), AnisotropicModel()])
    def test_views_disagree_per_charge_but_share_the_sum(self, model):
        s = PolarizerSettings.from_degrees(30.0, 0.0)
        view_a = model.predict(s, view=ObserverView.A)
        view_b = model.predict(s, view=ObserverView.B)
        largest_gap = max(
            abs(pa - pb)
            for charge in PhotonCharge
            for pa, pb in zip(
                view_a.per_charge[charge].dist.as_tuple(),
                view_b.per_charge[charge].dist.as_tuple(),
            )
        )
        assert largest_gap > 0.1
        assert view_a.summed.as_tuple() == pytest.approx(
            view_b.summed.as_tuple(), abs=TOL
        )

    @pytest.mark.parametrize("model", [BallsBoxesModel(), AnisotropicModel()])
    def test_views_disagree_for_every_intermediate_angle(self, model):
        for theta in range(5, 90, 5):
            s = PolarizerSettings.from_degrees(float(theta), 0.0)
            view_a = model.predict(s, view=ObserverView.A)
            view_b = model.predict(s, view=ObserverView.B)
            largest_gap = max(
                abs(pa - pb)
                for charge in PhotonCharge
                for pa, pb in zip(
                    view_a.per_charge[charge].dist.as_tuple(),
                    view_b.per_charge[charge].dist.as_tuple(),
                )
            )
            assert largest_gap > 0.0

    @pytest.mark.parametrize("model", [BallsBoxesModel(), AnisotropicModel()])
    def test_views_coincide_at_aligned_axes(self, model):
        s = PolarizerSettings.from_degrees(0.0, 0.0)
        view_a = model.predict(s, view=ObserverView.A)
        view_b = model.predict(s, view=ObserverView.B)
        for charge in PhotonCharge:
            assert view_a.per_charge[charge].dist.as_tuple() == pytest.approx(
                view_b.per_charge[charge].dist.as_tuple(), abs=TOL
            )


class TestAlignmentRelation:
    def test_alignment_at_thirty_degrees(self):
        s = PolarizerSettings.from_degrees(30.0, 0.0)
        assert alignment_probability(s) == pytest.approx(0.75, abs=TOL)

    def test_same_outcome_probability_matches_alignment(self):
        models = [QuantumModel(), BallsBoxesModel(), AnisotropicModel()]
        for s in grid_settings(step_deg=3.0):
            expected = alignment_probability(s)
            for model in models:
                got = same_outcome_probability(model.predict(s).summed)
                assert got == pytest.approx(expected, abs=TOL)


class TestLocalHiddenVariableModel:
    def test_equal_settings(self):
        d = LocalHiddenVariableModel().predict(PolarizerSettings.from_degrees(0.0, 0.0)).summed
        assert d.as_tuple() == (0.5, 0.0, 0.0, 0.5)

    def test_ninety_degrees_against_grid_oracle(self):
        d = LocalHiddenVariableModel().predict(PolarizerSettings.from_degrees(90.0, 0.0)).summed
        assert d.as_tuple() == pytest.approx((0.0, 0.5, 0.5, 0.0), abs=TOL)
        oracle = lhv_joint_by_grid(math.radians(90.0), 0.0)
        assert d.as_tuple() == pytest.approx(oracle, abs=2e-6)

    def test_forty_five_degrees_frozen_from_oracle(self):
        d = LocalHiddenVariableModel().predict(PolarizerSettings.from_degrees(45.0, 0.0)).summed
        assert d.p_yy == pytest.approx(LHV_P_YY_AT_45_DEG, abs=TOL)
        oracle = lhv_joint_by_grid(math.radians(45.0), 0.0)
        assert d.as_tuple() == pytest.approx(oracle, abs=2e-6)

    def test_closed_form_tracks_oracle_on_grid(self):
        model = LocalHiddenVariableModel()
        for deg in range(0, 91, 15):
            got = model.predict(PolarizerSettings.from_degrees(deg, 0.0)).summed.as_tuple()
            oracle = lhv_joint_by_grid(math.radians(deg), 0.0, n_grid=200_000)
            assert got == pytest.approx(oracle, abs=1e-5)

    def test_depends_only_on_relative_angle(self):
        model = LocalHiddenVariableModel()
        a = model.predict(PolarizerSettings.from_degrees(75.0, 30.0)).summed
        b = model.predict(PolarizerSettings.from_degrees(45.0, 0.0)).summed
        assert a.as_tuple() == pytest.approx(b.as_tuple(), abs=TOL)

    def test_only_charge_blind_view(self):
        with pytest.raises(ValueError):
            LocalHiddenVariableModel().predict(
                PolarizerSettings.from_degrees(0.0, 0.0), view=ObserverView.A
            )

    def test_marginals_are_half(self):
        model = LocalHiddenVariableModel()
        for s in grid_settings(step_deg=9.0):
            marg = marginals(model.predict(s).summed)
            assert marg.p_a_yes == pytest.approx(0.5, abs=TOL)
            assert marg.p_b_yes == pytest.approx(0.5, abs=TOL)


@given(theta_a=degree_angles, theta_b=degree_angles)
@settings(max_examples=60, deadline=None)
def test_equivalence_theorem_at_random_settings(theta_a, theta_b):
    s = PolarizerSettings.from_degrees(theta_a, theta_b)
    want = QuantumModel().predict(s).summed.as_tuple()
    for model in (BallsBoxesModel(), AnisotropicModel(0.3)):
        for view in (ObserverView.A, ObserverView.B):
            got = model.predict(s, view=view).summed.as_tuple()
            assert got == pytest.approx(want, abs=TOL)


class TestSamplers:
    def uniforms(self, seed, n):
        return trial_uniforms(seed, 0, n)

    def test_qm_equal_settings_forces_agreement(self):
        model = QuantumModel()
        s = PolarizerSettings.from_degrees(0.0, 0.0)
        for row in self.uniforms(11, 200):
            rec = model.sample(s, row)
            assert rec.outcome_a == rec.outcome_b
            assert rec.charge is None
            assert rec.hidden_angle is None

    def test_qm_crossed_settings_forces_disagreement(self):
        model = QuantumModel()
        s = PolarizerSettings.from_degrees(90.0, 0.0)
        for row in self.uniforms(12, 200):
            rec = model.sample(s, row)
            assert rec.outcome_a != rec.outcome_b

    def test_balls_equal_settings_by_charge(self):
        model = BallsBoxesModel()
        s = PolarizerSettings.from_degrees(0.0, 0.0)
        positive = model.sample(s, [0.2, 0.5, 0.5, 0.0])
        assert positive.charge is PhotonCharge.POSITIVE
        assert (positive.outcome_a, positive.outcome_b) == (Outcome.YES, Outcome.YES)
        negative = model.sample(s, [0.8, 0.5, 0.5, 0.0])
        assert negative.charge is PhotonCharge.NEGATIVE
        assert (negative.outcome_a, negative.outcome_b) == (Outcome.NO, Outcome.NO)

    def test_aniso_equal_settings_outcomes_match(self):
        model = AnisotropicModel()
        s = PolarizerSettings.from_degrees(0.0, 0.0)
        for row in self.uniforms(13, 200):
            rec = model.sample(s, row)
            assert rec.outcome_a == rec.outcome_b
            assert rec.charge is not None
            assert rec.hidden_angle is not None

    def test_aniso_charge_follows_quadrant_of_hidden_angle(self):
        model = AnisotropicModel()
        s = PolarizerSettings.from_degrees(10.0, 0.0)
        for u0, expected in (
            (0.1, PhotonCharge.NEGATIVE),
            (0.3, PhotonCharge.POSITIVE),
            (0.6, PhotonCharge.NEGATIVE),
            (0.9, PhotonCharge.POSITIVE),
        ):
            rec = model.sample(s, [u0, 0.5, 0.5, 0.0])
            assert rec.charge is expected

    def test_lhv_records_hidden_axis(self):
        model = LocalHiddenVariableModel()
        s = PolarizerSettings.from_degrees(0.0, 0.0)
        rec = model.sample(s, [0.25, 0.0, 0.0, 0.0])
        assert rec.hidden_angle is not None
        assert rec.hidden_angle.radians == pytest.approx(math.pi / 4, abs=TOL)
        assert rec.charge is None

    @pytest.mark.parametrize(
        "model",
        [QuantumModel(), BallsBoxesModel(), AnisotropicModel(), LocalHiddenVariableModel()],
    )
    def test_scalar_path_matches_batch_path(self, model):
        s = PolarizerSettings.from_degrees(33.0, 5.0)
        u = self.uniforms(99, 500)
        batch = model.sample_batch(s, u)
        for i in range(500):
            rec = model.sample(s, u[i])
            assert (rec.outcome_a is Outcome.YES) == bool(batch.a_yes[i])
            assert (rec.outcome_b is Outcome.YES) == bool(batch.b_yes[i])
            if batch.charge_positive is not None:
                assert (rec.charge is PhotonCharge.POSITIVE) == bool(
                    batch.charge_positive[i]
                )

    def test_rejects_malformed_uniform_block(self):
        model = QuantumModel()
        s = PolarizerSettings.from_degrees(0.0, 0.0)
        with pytest.raises(ValueError):
            model.sample_batch(s, np.zeros((5, TRIAL_STRIDE + 1)))
        with pytest.raises(ValueError):
            model.sample(s, [0.5, 0.5])

    def test_aniso_charge_frequency_is_half(self):
        u = self.uniforms(2024, 1_000_000)
        batch = AnisotropicModel().sample_batch(
            PolarizerSettings.from_degrees(22.5, 0.0), u
        )
        fraction = batch.charge_positive.mean()
        se = math.sqrt(0.25 / 1_000_000)
        assert abs(fraction - 0.5) < 4 * se

    def test_qm_million_trials_hits_binomial_band(self):
        u = self.uniforms(515, 1_000_000)
        s = PolarizerSettings.from_degrees(30.0, 0.0)
        batch = QuantumModel().sample_batch(s, u)
        p_yy = float(np.mean(batch.a_yes & batch.b_yes))
        se = math.sqrt(0.375 * 0.625 / 1_000_000)
        assert abs(p_yy - 0.375) < 4 * se


class TestPredictionSet:
    def test_rejects_inconsistent_sum(self):
        half_yy = WeightedDistribution(0.5, JointDistribution(1.0, 0.0, 0.0, 0.0))
        half_nn = WeightedDistribution(0.5, JointDistribution(0.0, 0.0, 0.0, 1.0))
        with pytest.raises(ValueError):
            PredictionSet(
                summed=JointDistribution(0.25, 0.25, 0.25, 0.25),
                per_charge={
                    PhotonCharge.POSITIVE: half_yy,
                    PhotonCharge.NEGATIVE: half_nn,
                },
            )


class TestBuildModel:
    def test_known_models(self):
        assert build_model("qm").model_id == "qm"
        assert build_model("balls").model_id == "balls"
        assert build_model("aniso", r=0.25).model_id == "aniso"
        assert build_model("lhv").model_id == "lhv"

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            build_model("bohm")
