"""Unit tests for exact classical evolution and phase-space sections."""

import math

import numpy as np
import pytest

from symplecta.dynamics import (
    PhaseState,
    SectionPlane,
    energy,
    evolve,
    evolve_trajectory,
    propagator,
    sample_times,
    section_curve,
)
from symplecta.errors import IndefiniteSectionError, SampleBudgetError, UnstableModeError, ValidationError
from symplecta.oracles import rk4_hamilton
from symplecta.pipeline import OscillatorNetwork, Stage, decompose


@pytest.mark.unit
class TestPropagator:
    """Test the normal-mode propagator."""

    def test_identity_at_zero(self):
        """Test Λ(0) = I."""
        assert propagator([1.0, 2.0], 0.0).matrix() == pytest.approx(np.eye(4))

    def test_group_property(self):
        """Test Λ(t₁)·Λ(t₂) = Λ(t₁ + t₂)."""
        omegas = [1.3, 0.4, 2.2]
        product = propagator(omegas, 0.7).matrix() @ propagator(omegas, 1.9).matrix()
        assert product == pytest.approx(propagator(omegas, 2.6).matrix(), abs=1e-14)

    def test_plane_rotations_multiply_to_full(self):
        """Test that the single-plane factors multiply to Λ."""
        blocks = propagator([1.3, 0.4, 2.2], 1.1)
        product = np.eye(6)
        for i in range(1, 4):
            product = blocks.plane_rotation(i) @ product
        assert product == pytest.approx(blocks.matrix(), abs=1e-15)

    def test_apply_matches_matrix(self, rng):
        """Test the vectorized application."""
        blocks = propagator([1.3, 0.4], 2.0)
        x = rng.normal(size=4)
        assert blocks.apply(x) == pytest.approx(blocks.matrix() @ x)


@pytest.mark.unit
class TestEvolve:
    """Test evolve and evolve_trajectory."""

    def test_zero_time_returns_initial(self, star4, rng):
        """Test that t = 0 returns the initial state unchanged."""
        x0 = PhaseState(q=rng.normal(size=4), p=rng.normal(size=4))
        assert evolve(star4, x0, 0.0) is x0

    def test_decoupled_cosine(self):
        """Test q₁(t) = cos(ω₁t) for a unit initial q₁ in a decoupled network."""
        net = OscillatorNetwork(diag_freq=[1.7, 0.9], couplings=[0.0])
        x0 = PhaseState(q=[1.0, 0.0], p=[0.0, 0.0])
        for t in (0.3, 2.0, 11.5):
            state = evolve(net, x0, t)
            assert state.q[0] == pytest.approx(math.cos(1.7 * t), abs=1e-12)
            assert state.p[0] == pytest.approx(-math.sin(1.7 * t), abs=1e-12)
            assert state.q[1] == pytest.approx(0.0, abs=1e-12)

    def test_matches_rk4(self, star4, rng):
        """Test the exact solution against RK4 at t = 5."""
        x0 = PhaseState(q=rng.normal(size=4), p=rng.normal(size=4))
        exact = evolve(star4, x0, 5.0).as_vector()
        reference = rk4_hamilton(star4, x0.as_vector(), 5.0, 1e-3)
        assert np.max(np.abs(exact - reference)) <= 1e-8

    def test_reversibility(self, star4, rng):
        """Test evolve(evolve(x, t), -t) = x."""
        x0 = PhaseState(q=rng.normal(size=4), p=rng.normal(size=4))
        back = evolve(star4, evolve(star4, x0, 13.0), -13.0)
        assert back.as_vector() == pytest.approx(x0.as_vector(), abs=1e-10)

    def test_composition(self, two_osc, rng):
        """Test evolve(t₁ + t₂) = evolve(evolve(t₁), t₂)."""
        x0 = PhaseState(q=rng.normal(size=2), p=rng.normal(size=2))
        direct = evolve(two_osc, x0, 3.5).as_vector()
        chained = evolve(two_osc, evolve(two_osc, x0, 1.2), 2.3).as_vector()
        assert direct == pytest.approx(chained, abs=1e-12)

    def test_energy_conserved(self, star4, rng):
        """Test that energy is constant along a trajectory."""
        x0 = PhaseState(q=rng.normal(size=4), p=rng.normal(size=4))
        e0 = energy(star4, x0)
        for sample in evolve_trajectory(star4, x0, 50.0, 0.25):
            assert energy(star4, sample.state) == pytest.approx(e0, rel=1e-9)

    def test_dimension_mismatch(self, two_osc):
        """Test that a state of the wrong size is rejected."""
        with pytest.raises(ValidationError):
            evolve(two_osc, PhaseState(q=[1.0, 0.0, 0.0], p=[0.0, 0.0, 0.0]), 1.0)

    def test_unstable_network(self):
        """Test that evolving an unstable network raises UnstableModeError."""
        net = OscillatorNetwork.two(1.0, 1.0, -2.0)
        with pytest.raises(UnstableModeError):
            evolve(net, PhaseState(q=[1.0, 0.0], p=[0.0, 0.0]), 1.0)

    def test_trajectory_samples(self, two_osc):
        """Test sample times and the exact first sample."""
        x0 = PhaseState(q=[1.0, 0.0], p=[0.0, 0.0])
        samples = evolve_trajectory(two_osc, x0, 1.0, 0.1)
        assert len(samples) == 11
        assert samples[0].state is x0
        assert samples[-1].t == pytest.approx(1.0)

    def test_trajectory_matches_evolve(self, star4, rng):
        """Test that every sample equals a direct evolve call."""
        x0 = PhaseState(q=rng.normal(size=4), p=rng.normal(size=4))
        decomposition = decompose(star4)
        for sample in evolve_trajectory(star4, x0, 3.0, 0.5, decomposition=decomposition):
            expected = evolve(star4, x0, sample.t, decomposition=decomposition).as_vector()
            assert sample.state.as_vector() == pytest.approx(expected, abs=1e-13)

    def test_single_sample(self, two_osc):
        """Test that t_max = 0 gives one sample."""
        samples = evolve_trajectory(two_osc, PhaseState(q=[1.0, 0.0], p=[0.0, 0.0]), 0.0, 0.1)
        assert len(samples) == 1

    def test_sample_budget(self):
        """Test that more than 10⁷ samples are refused."""
        with pytest.raises(SampleBudgetError):
            sample_times(1.0, 1e-8)

    @pytest.mark.parametrize("t_max,dt", [(1.0, 0.0), (1.0, -0.1), (-1.0, 0.1)])
    def test_invalid_sampling(self, t_max, dt):
        """Test that non-positive dt and negative t_max are rejected."""
        with pytest.raises(ValidationError):
            sample_times(t_max, dt)


@pytest.mark.unit
class TestSections:
    """Test section_curve."""

    def test_final_stage_is_circle(self, star4):
        """Test that every normal-mode plane (q̄_i, p̄_i) is a circle."""
        for i in range(4):
            curve = section_curve(star4, Stage.AFTER_T, SectionPlane(i, 4 + i, 4))
            assert curve.axis_ratio() == pytest.approx(1.0, abs=1e-10)
            assert curve.labels == (f"q{i + 1}_T", f"p{i + 1}_T")

    def test_squeezed_momenta_are_circle(self):
        """Test that (p₁, p₂) after the squeeze is a circle."""
        net = OscillatorNetwork.two(0.6, 2.1, -0.4)
        curve = section_curve(net, Stage.AFTER_S, SectionPlane(2, 3, 2))
        assert curve.axis_ratio() == pytest.approx(1.0, abs=1e-10)

    def test_original_positions_tilted(self, two_osc):
        """Test that a coupled (q₁, q₂) section has a cross term."""
        curve = section_curve(two_osc, Stage.ORIGINAL, SectionPlane(0, 1, 2))
        assert curve.cross_term == pytest.approx(-0.25)
        assert curve.axis_ratio() > 1.0

    def test_points_on_level_set(self, star4):
        """Test that every point satisfies uᵀ·A·u = E."""
        curve = section_curve(star4, Stage.AFTER_R, SectionPlane(0, 2, 4), energy_level=2.5, samples=100)
        assert curve.points.shape == (100, 2)
        assert curve.residual() <= 1e-12

    def test_indefinite_section(self):
        """Test that an indefinite restriction raises IndefiniteSectionError."""
        net = OscillatorNetwork.two(1.0, 1.0, -1.5)
        with pytest.raises(IndefiniteSectionError) as excinfo:
            section_curve(net, Stage.ORIGINAL, SectionPlane(0, 1, 2))
        assert excinfo.value.exit_code == 3

    def test_validation(self, two_osc):
        """Test energy and sample-count checks."""
        with pytest.raises(ValidationError):
            section_curve(two_osc, Stage.ORIGINAL, SectionPlane(0, 1, 2), energy_level=0.0)
        with pytest.raises(ValidationError):
            section_curve(two_osc, Stage.ORIGINAL, SectionPlane(0, 1, 2), samples=4)
        with pytest.raises(ValidationError):
            SectionPlane(1, 1, 2)
