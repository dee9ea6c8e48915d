"""
trio 모듈 테스트
"""

import math

import numpy as np
import pytest

from src.angular import AngularLabel, PureState, TimeReversal
from src.errors import BasisError, DimensionError, ValidationError
from src.trio import DensityOperator, Instrument, KrausOperator, Trio


class TestIsTrio:
    """TRIO 판정"""

    def test_real_matrix(self):
        assert Trio.is_trio(KrausOperator(np.array([[0.3, -0.2], [0.1, 0.9]])))

    def test_global_phase_ignored(self):
        mat = np.exp(0.7j) * np.array([[0.3, -0.2], [0.1, 0.9]])
        assert Trio.is_trio(KrausOperator(mat))

    def test_complex_matrix(self):
        assert not Trio.is_trio(KrausOperator(np.diag([1.0, 1j])))

    def test_accepts_raw_matrix(self):
        assert Trio.is_trio(np.eye(3))

    @pytest.mark.parametrize("seed", range(5))
    def test_covariance_agrees(self, seed):
        rng = np.random.default_rng(seed)
        real = KrausOperator(rng.normal(size=(3, 3)))
        generic = KrausOperator(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        assert Trio.covariance_check(real, trials=20, seed=seed)
        assert not Trio.covariance_check(generic, trials=20, seed=seed)

    def test_covariance_examples(self):
        c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
        assert Trio.covariance_check(KrausOperator(np.array([[c, -s], [s, c]])), trials=10, seed=0)
        assert not Trio.covariance_check(KrausOperator(np.diag([1.0, np.exp(1j * math.pi / 4)])),
                                         trials=10, seed=0)

    def test_covariance_requires_square(self):
        with pytest.raises(DimensionError):
            Trio.covariance_defect(KrausOperator(np.ones((2, 3))))


class TestInstrument:
    """측정 생성과 검증"""

    def test_empty(self):
        with pytest.raises(DimensionError):
            Instrument([])

    def test_mixed_dimensions(self):
        with pytest.raises(DimensionError):
            Instrument.from_matrices([np.eye(2), np.eye(3)])

    def test_random_orthogonal(self):
        o = Trio.random_trio_orthogonal(4, seed=1)
        assert np.allclose(o.mat.T @ o.mat, np.eye(4), atol=1e-12)
        assert Trio.is_trio(o)
        assert np.array_equal(o.mat, Trio.random_trio_orthogonal(4, seed=1).mat)

    def test_random_orthogonal_one_dim(self):
        o = Trio.random_trio_orthogonal(1, seed=0)
        assert abs(o.mat[0, 0]) == 1.0

    @pytest.mark.parametrize("dim,outcomes", [(2, 2), (3, 4), (1, 3)])
    def test_random_instrument_is_trio(self, dim, outcomes):
        inst = Trio.random_trio_instrument(dim, outcomes, seed=5)
        report = Trio.validate_instrument(inst)
        assert len(inst) == outcomes
        assert report.complete and report.trio
        assert report.defect <= 1e-12

    def test_incomplete(self):
        inst = Instrument.from_matrices([0.5 * np.eye(2)])
        report = Trio.validate_instrument(inst)
        assert not report.complete
        assert report.defect == pytest.approx(0.75)
        assert not Trio.is_trio_instrument(inst)

    def test_single_half_identity(self):
        report = Trio.validate_instrument([np.eye(2) / math.sqrt(2)])
        assert report.trio
        assert not report.complete
        assert report.defect == pytest.approx(0.5)

    def test_validate_raw_matrices(self):
        assert Trio.is_trio_instrument([np.eye(2) / math.sqrt(2), np.eye(2) / math.sqrt(2)])


class TestApplyInstrument:
    """측정 적용"""

    def test_probabilities_sum(self):
        psi = Trio.random_state(3, seed=2)
        inst = Trio.random_trio_instrument(3, 3, seed=2)
        ensemble = Trio.apply_instrument(inst, psi)
        assert sum(p for p, _ in ensemble) == pytest.approx(1.0, abs=1e-12)
        for p, state in ensemble:
            if state is not None:
                state.check_normalized(1e-12)

    def test_invariant_input_stays_invariant(self):
        psi = PureState.self_conjugate([0.6, 0.0, 0.8])
        inst = Trio.random_trio_instrument(3, 2, seed=9)
        for p, state in Trio.apply_instrument(inst, psi):
            if state is not None:
                assert TimeReversal.is_invariant(state)

    def test_zero_probability_branch(self):
        psi = PureState.self_conjugate([1.0, 0.0])
        inst = Instrument.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        ensemble = Trio.apply_instrument(inst, psi)
        assert ensemble[1] == (0.0, None)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            Trio.apply_instrument(Trio.random_trio_instrument(3, seed=0), PureState.self_conjugate([1.0, 0.0]))

    def test_basis_mismatch(self):
        psi = PureState.basis_state(AngularLabel(1, 0, 0))
        with pytest.raises(BasisError):
            Trio.apply_instrument(Trio.random_trio_instrument(1, seed=0), psi)


class TestGroupAverage:
    """TR 그룹 평균"""

    @pytest.mark.parametrize("theta", [0.0, math.pi / 6, math.pi / 3, math.pi / 2])
    def test_standard_state_purity(self, theta):
        psi = PureState.self_conjugate(np.array([1.0, np.exp(1j * theta)]) / math.sqrt(2))
        rho = Trio.group_average_state(psi)
        assert rho.purity == pytest.approx((1 + math.cos(theta) ** 2) / 2, abs=1e-12)

    def test_idempotent_and_real(self):
        psi = Trio.random_state(4, seed=8)
        once = Trio.group_average_state(psi)
        twice = Trio.group_average(once)
        assert np.allclose(once.mat, twice.mat, atol=1e-15)
        assert np.max(np.abs(once.mat.imag)) == 0.0

    def test_trio_commutes_with_average(self):
        psi = Trio.random_state(3, seed=4)
        o = Trio.random_trio_orthogonal(3, seed=4).mat
        rho = DensityOperator.from_state(psi)
        rotated = DensityOperator(o @ rho.mat @ o.T)
        left = Trio.group_average(rotated).mat
        right = o @ Trio.group_average(rho).mat @ o.T
        assert np.allclose(left, right, atol=1e-12)


class TestDensityOperator:
    """밀도 연산자 검증"""

    def test_not_square(self):
        with pytest.raises(DimensionError):
            DensityOperator(np.ones((2, 3)))

    def test_not_hermitian(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.array([[0.5, 0.1], [0.3, 0.5]]))

    def test_trace(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.eye(2))

    def test_negative(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_from_state_requires_self_conjugate(self):
        with pytest.raises(BasisError):
            DensityOperator.from_state(PureState.basis_state(AngularLabel(1, 1, 1)))


@pytest.mark.slow
class TestCovarianceAtScale:
    """무작위 Kraus 표본 100개"""

    def test_irreducibly_imaginary(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            dim = int(rng.integers(2, 7))
            mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            k = KrausOperator(np.exp(1j * rng.uniform(0, 2 * math.pi)) * mat)
            assert not Trio.is_trio(k)
            assert not Trio.covariance_check(k, trials=20, seed=rng)

    def test_real_up_to_phase(self):
        rng = np.random.default_rng(98)
        for _ in range(100):
            dim = int(rng.integers(2, 7))
            k = KrausOperator(np.exp(1j * rng.uniform(0, 2 * math.pi)) * rng.normal(size=(dim, dim)))
            assert Trio.is_trio(k)
            assert Trio.covariance_check(k, trials=20, seed=rng)
