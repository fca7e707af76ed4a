import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ditto import training
from ditto.errors import DimensionMismatch, InvalidConfig
from ditto.training import ConditioningTag, CurriculumSchedule, FlowSample


class TestSchedule:
    def test_endpoints(self):
        sched = CurriculumSchedule(5000, 16000)
        assert training.scaffold_probability(0, sched) == 1.0
        assert training.scaffold_probability(5000, sched) == 0.0
        assert training.scaffold_probability(16000, sched) == 0.0

    def test_hand_values(self):
        sched = CurriculumSchedule(5000, 16000)
        assert training.scaffold_probability(1250, sched) == pytest.approx(0.75)
        assert training.scaffold_probability(2500, sched) == pytest.approx(0.5)
        assert training.scaffold_probability(4000, sched) == pytest.approx(0.2)

    def test_monotone_nonincreasing_full_run(self):
        sched = CurriculumSchedule()
        prev = 1.0
        for step in range(0, 16001):
            p = training.scaffold_probability(step, sched)
            assert 0.0 <= p <= prev
            prev = p

    def test_zero_after_warmup_never_negative(self):
        sched = CurriculumSchedule(100, 1000)
        assert training.scaffold_probability(999, sched) == 0.0

    def test_invalid_schedule(self):
        with pytest.raises(InvalidConfig):
            training.scaffold_probability(0, CurriculumSchedule(0, 100))
        with pytest.raises(InvalidConfig):
            training.scaffold_probability(0, CurriculumSchedule(200, 100))
        with pytest.raises(ValueError):
            training.scaffold_probability(-1, CurriculumSchedule())

    def test_sample_scaffold_deterministic(self):
        sched = CurriculumSchedule()
        a = [training.sample_scaffold(100, sched, seed=7, draw=d) for d in range(50)]
        b = [training.sample_scaffold(100, sched, seed=7, draw=d) for d in range(50)]
        assert a == b

    def test_sample_scaffold_fractions(self):
        sched = CurriculumSchedule(5000, 16000)
        n = 4000
        for step, expected in [(0, 1.0), (2500, 0.5), (4000, 0.2), (5000, 0.0)]:
            hits = sum(
                training.sample_scaffold(step, sched, seed=1, draw=d)
                is ConditioningTag.TEXT_PLUS_SCAFFOLD
                for d in range(n)
            )
            assert hits / n == pytest.approx(expected, abs=0.03)


class TestFlow:
    def test_interpolate_endpoints(self):
        z0 = np.array([1.0, 2.0])
        eps = np.array([-3.0, 5.0])
        assert np.array_equal(training.interpolate(z0, eps, 0.0), z0)
        assert np.array_equal(training.interpolate(z0, eps, 1.0), eps)

    def test_interpolate_midpoint(self):
        out = training.interpolate(np.array([2.0, 0.0]), np.array([0.0, 4.0]), 0.5)
        assert np.allclose(out, [1.0, 2.0])

    def test_target_hand_value(self):
        # z0=[1,2], eps=[3,6], t=0.5 -> z_t=[2,4], target = z0 - z_t = [-1,-2]
        sample = FlowSample(np.array([1.0, 2.0]), np.array([3.0, 6.0]), 0.5)
        assert np.allclose(training.flow_target(sample), [-1.0, -2.0])

    def test_loss_hand_value(self):
        # pred=[0,0] vs target [-1,-2]: sum = 1 + 4 = 5, mean = 2.5
        sample = FlowSample(np.array([1.0, 2.0]), np.array([3.0, 6.0]), 0.5)
        pred = np.zeros(2)
        assert training.flow_matching_loss(pred, sample) == pytest.approx(5.0)
        assert training.flow_matching_loss(pred, sample, "mean") == pytest.approx(2.5)

    def test_perfect_prediction_zero_loss(self):
        sample = FlowSample(np.arange(6.0), np.arange(6.0)[::-1].copy(), 0.3)
        assert training.flow_matching_loss(training.flow_target(sample), sample) == 0.0

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        sample = FlowSample(rng.normal(size=5), rng.normal(size=5), 0.4)
        pred = rng.normal(size=5)
        analytic = training.flow_matching_loss_grad(pred, sample)
        h = 1e-6
        for i in range(5):
            bump = pred.copy()
            bump[i] += h
            fd = (training.flow_matching_loss(bump, sample)
                  - training.flow_matching_loss(pred, sample)) / h
            assert fd == pytest.approx(analytic[i], abs=1e-5)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            FlowSample(np.zeros(3), np.zeros(4), 0.5)
        sample = FlowSample(np.zeros(3), np.zeros(3), 0.5)
        with pytest.raises(DimensionMismatch):
            training.flow_matching_loss(np.zeros(4), sample)

    def test_t_bounds(self):
        with pytest.raises(ValueError):
            FlowSample(np.zeros(2), np.zeros(2), 1.5)

    @settings(max_examples=60, deadline=None)
    @given(t=st.floats(0.0, 1.0), seed=st.integers(0, 100))
    def test_loss_nonnegative(self, t, seed):
        rng = np.random.default_rng(seed)
        sample = FlowSample(rng.normal(size=4), rng.normal(size=4), t)
        pred = rng.normal(size=4)
        assert training.flow_matching_loss(pred, sample) >= 0.0
