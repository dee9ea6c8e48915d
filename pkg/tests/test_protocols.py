"""
protocols 모듈 테스트
"""

import math

import numpy as np
import pytest

from src.errors import DimensionError, InvalidTarget, MonotoneViolation, SizeError, ValidationError
from src.monotones import Monotones
from src.protocols import Protocols, TargetEnsemble
from src.standardform import StandardForm, StandardResource
from src.trio import Trio


def _assert_branch_taus(plan, expected_by_path):
    for branch in plan.execute():
        if branch.probability <= 1e-15:
            continue
        assert Monotones.tau(branch.state) == pytest.approx(expected_by_path[branch.path], abs=1e-9)


class TestTargetEnsemble:
    """목표 앙상블"""

    def test_average(self):
        target = TargetEnsemble.from_pairs([(0.5, 0.0), (0.5, math.pi / 2)])
        assert target.average_cos == pytest.approx(0.5)
        assert target.average_tau == pytest.approx(0.5)
        assert target.probabilities == [0.5, 0.5]

    def test_bad_probabilities(self):
        with pytest.raises(ValidationError):
            TargetEnsemble.from_pairs([(0.7, 0.1), (0.7, 0.2)])
        with pytest.raises(ValidationError):
            TargetEnsemble.from_pairs([(1.2, 0.1), (-0.2, 0.2)])

    def test_empty(self):
        with pytest.raises(DimensionError):
            TargetEnsemble([])

    def test_bad_angle(self):
        with pytest.raises(ValidationError):
            TargetEnsemble.from_pairs([(1.0, 2.0)])


class TestDeterministic:
    """결정적 변환"""

    def test_parameter(self):
        assert Protocols.deterministic_parameter(math.pi / 3, math.pi / 4) == pytest.approx(0.78868, abs=1e-5)

    def test_maximal_to_free(self):
        plan = Protocols.deterministic_convert(math.pi / 2, 0.0)
        assert plan.parameters["A"] == pytest.approx(1.0)
        _assert_branch_taus(plan, {(0,): 0.0, (1,): 0.0})

    def test_free_source(self):
        assert Protocols.deterministic_parameter(0.0, 0.0) == 0.5

    @pytest.mark.parametrize("theta,gamma", [
        (math.pi / 3, math.pi / 4),
        (math.pi / 2, math.pi / 3),
        (1.0, 1.0),
        (0.4, 0.0),
        (math.pi / 2, math.pi / 2),
    ])
    def test_branches_reach_target(self, theta, gamma):
        plan = Protocols.deterministic_convert(theta, gamma)
        inst = plan.stages[0].instrument
        assert Trio.is_trio_instrument(inst, 1e-10)

        branches = plan.execute()
        assert [b.probability for b in branches] == pytest.approx([0.5, 0.5], abs=1e-10)
        target_tau = 1.0 - math.cos(gamma)
        for branch in branches:
            assert Monotones.tau(branch.state) == pytest.approx(target_tau, abs=1e-9)

    def test_branches_are_standard_form(self):
        gamma = math.pi / 4
        plan = Protocols.deterministic_convert(math.pi / 3, gamma)
        target = StandardForm.standard_state(StandardResource(gamma))
        for branch in plan.execute():
            assert abs(branch.state.amp[0]) == pytest.approx(1 / math.sqrt(2), abs=1e-9)
            assert branch.state.fidelity(target) == pytest.approx(1.0, abs=1e-9)

    def test_increase_rejected(self):
        with pytest.raises(MonotoneViolation) as exc_info:
            Protocols.deterministic_convert(math.pi / 4, math.pi / 3)
        assert exc_info.value.exit_code == 2
        assert exc_info.value.before < exc_info.value.after

    def test_angle_range(self):
        with pytest.raises(ValidationError):
            Protocols.deterministic_convert(2.0, 0.1)

    def test_plan_input_dimension(self):
        plan = Protocols.deterministic_convert(math.pi / 3, 0.5)
        with pytest.raises(DimensionError):
            plan.execute(StandardForm.standard_state(StandardResource(math.pi / 3), 3))


class TestEnsemble:
    """앙상블 변환"""

    def test_half_free_half_maximal(self):
        target = TargetEnsemble.from_pairs([(0.5, 0.0), (0.5, math.pi / 2)])
        plan = Protocols.ensemble_convert(math.pi / 2, target)
        assert plan.parameters["gamma_bar"] == pytest.approx(math.pi / 3)
        assert plan.expected_probability == pytest.approx(1.0)
        assert plan.average_tau() == pytest.approx(0.5, abs=1e-9)

        by_path = {b.path: b.probability for b in plan.execute()}
        assert sum(by_path.values()) == pytest.approx(1.0, abs=1e-10)
        for (j, k), p in by_path.items():
            assert p == pytest.approx(0.25, abs=1e-9)
        _assert_branch_taus(plan, {(j, k): (0.0, 1.0)[k] for j in range(2) for k in range(2)})

    @pytest.mark.parametrize("seed", range(6))
    def test_random_feasible(self, seed):
        rng = np.random.default_rng(seed)
        size = int(rng.integers(1, 5))
        probabilities = rng.dirichlet(np.ones(size))
        theta = float(rng.uniform(0.05, math.pi / 2))
        angles = rng.uniform(0.0, theta, size=size)
        target = TargetEnsemble.from_pairs(list(zip(probabilities, angles)))

        plan = Protocols.ensemble_convert(theta, target)
        for stage in plan.stages:
            assert Trio.is_trio_instrument(stage.instrument, 1e-10)
        expected = {(j, k): 1.0 - math.cos(angles[k]) for j in range(2) for k in range(size)}
        probs = {b.path: b.probability for b in plan.execute()}
        for (j, k), p in probs.items():
            assert p == pytest.approx(0.5 * probabilities[k], abs=1e-9)
        _assert_branch_taus(plan, expected)

    def test_free_targets(self):
        target = TargetEnsemble.from_pairs([(0.3, 0.0), (0.7, 0.0)])
        plan = Protocols.ensemble_convert(0.8, target)
        assert plan.parameters["b"] == [0.0, 0.0]
        assert plan.parameters["a"] == pytest.approx([math.sqrt(0.3), math.sqrt(0.7)])

    def test_increase_rejected(self):
        target = TargetEnsemble.from_pairs([(0.5, 0.2), (0.5, math.pi / 2)])
        with pytest.raises(MonotoneViolation):
            Protocols.ensemble_convert(math.pi / 4, target)

    def test_accepts_pairs(self):
        plan = Protocols.ensemble_convert(1.0, [(1.0, 0.5)])
        assert plan.parameters["gamma_bar"] == pytest.approx(0.5)


class TestMaxProbability:
    """최대 확률 변환"""

    def test_half(self):
        p, plan = Protocols.max_probability(math.pi / 3, math.pi / 2)
        assert p == pytest.approx(0.5)
        assert plan.parameters["p"] == pytest.approx(0.5)
        assert plan.success_probability(math.pi / 2) == pytest.approx(0.5, abs=1e-9)

    def test_deterministic_when_feasible(self):
        p, plan = Protocols.max_probability(math.pi / 3, math.pi / 4)
        assert p == 1.0
        assert plan.success_probability(math.pi / 4) == pytest.approx(1.0, abs=1e-9)

    def test_free_target(self):
        p, _ = Protocols.max_probability(0.5, 0.0)
        assert p == 1.0

    def test_free_source(self):
        p, _ = Protocols.max_probability(0.0, 1.0)
        assert p == 0.0

    def test_sampling_reproducible(self):
        _, plan = Protocols.max_probability(math.pi / 3, math.pi / 2)
        first = plan.sample(seed=4, trials=500)
        assert first == plan.sample(seed=4, trials=500)
        assert sum(first.values()) == 500
        assert list(first.keys()) == sorted(first.keys())


class TestAsymptotic:
    """점근 비율과 사본 수"""

    def test_rate(self):
        assert Protocols.asymptotic_rate(math.pi / 3, math.acos(0.25)) == pytest.approx(0.5)

    def test_rate_edges(self):
        assert Protocols.asymptotic_rate(math.pi / 2, math.pi / 2) == 1.0
        assert math.isinf(Protocols.asymptotic_rate(math.pi / 2, 1.0))
        assert Protocols.asymptotic_rate(1.0, math.pi / 2) == 0.0
        assert Protocols.asymptotic_rate(0.0, 1.0) == 0.0

    def test_rate_free_target(self):
        with pytest.raises(InvalidTarget):
            Protocols.asymptotic_rate(1.0, 0.0)

    def test_max_copies(self):
        assert Protocols.max_copies(4, math.acos(0.5), math.acos(0.25)) == 2
        assert Protocols.max_copies(5, math.acos(0.5), math.acos(0.25)) == 2
        assert Protocols.max_copies(3, 0.0, 1.0) == 0

    def test_max_copies_invalid(self):
        with pytest.raises(InvalidTarget):
            Protocols.max_copies(3, 1.0, 0.0)
        with pytest.raises(InvalidTarget):
            Protocols.max_copies(3, math.pi / 2, 1.0)
        with pytest.raises(SizeError):
            Protocols.max_copies(0, 1.0, 1.0)

    @pytest.mark.parametrize("n", [1, 3, 7, 12])
    def test_max_copies_agrees_with_power_angles(self, n):
        theta_psi, theta_phi = 0.9, 0.6
        m = Protocols.max_copies(n, theta_psi, theta_phi)
        assert Protocols.copies_feasible(n, m, theta_psi, theta_phi)
        assert not Protocols.copies_feasible(n, m + 1, theta_psi, theta_phi)

    def test_rate_is_limit(self):
        theta_psi, theta_phi = 1.1, 0.7
        rate = Protocols.asymptotic_rate(theta_psi, theta_phi)
        n = 100000
        assert Protocols.max_copies(n, theta_psi, theta_phi) / n == pytest.approx(rate, abs=1e-4)


@pytest.mark.slow
class TestProtocolsAtScale:
    """격자와 무작위 표본 전체에서의 변환"""

    def test_deterministic_grid(self):
        grid = np.linspace(0.0, math.pi / 2, 50)
        for theta in grid:
            for gamma in grid:
                if gamma > theta:
                    with pytest.raises(MonotoneViolation):
                        Protocols.deterministic_convert(theta, gamma)
                    continue
                plan = Protocols.deterministic_convert(theta, gamma)
                assert Trio.is_trio_instrument(plan.stages[0].instrument, 1e-10)
                for branch in plan.execute():
                    assert branch.probability == pytest.approx(0.5, abs=1e-10)
                    assert Monotones.tau(branch.state) == pytest.approx(1.0 - math.cos(gamma), abs=1e-9)

    def test_random_ensembles(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            size = int(rng.integers(1, 6))
            probabilities = rng.dirichlet(np.ones(size))
            theta = float(rng.uniform(0.05, math.pi / 2))
            angles = rng.uniform(0.0, theta, size=size)
            target = TargetEnsemble.from_pairs(list(zip(probabilities, angles)))

            plan = Protocols.ensemble_convert(theta, target)
            for stage in plan.stages:
                assert Trio.is_trio_instrument(stage.instrument, 1e-10)
            for branch in plan.execute():
                k = branch.path[1]
                assert branch.probability == pytest.approx(0.5 * probabilities[k], abs=1e-9)
                if branch.probability > 1e-15:
                    assert Monotones.tau(branch.state) == pytest.approx(1.0 - math.cos(angles[k]), abs=1e-9)
            assert plan.average_tau() <= 1.0 - math.cos(theta) + 1e-12

    def test_max_probability_pairs(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            theta = float(rng.uniform(0.0, math.pi / 2))
            gamma = float(rng.uniform(1e-3, math.pi / 2))
            expected = min(1.0, (1.0 - math.cos(theta)) / (1.0 - math.cos(gamma)))
            p, plan = Protocols.max_probability(theta, gamma)
            assert p == pytest.approx(expected, abs=1e-12)
            assert plan.success_probability(gamma) == pytest.approx(expected, abs=1e-9)
