"""
angular 모듈 테스트: 위상 규약, 라벨, 자기켤레 기저, CG 계수, 곱 상태 TR
"""

import math

import numpy as np
import pytest
from sympy.physics.quantum.cg import CG

from src.angular import (
    AngularCoupling,
    AngularLabel,
    Basis,
    ClebschGordan,
    MultiplicityCounter,
    PhaseConvention,
    ProductLabel,
    PureState,
    SelfConjLabel,
    TimeReversal,
)
from src.errors import (
    BasisError,
    DimensionError,
    IncompleteSpace,
    InvalidLabel,
    NormalizationError,
    ValidationError,
)


def _angular_multiplet(ell, mu=1):
    return [AngularLabel(mu, ell, m) for m in range(-ell, ell + 1)]


def _random_angular(rng, ell):
    labels = _angular_multiplet(ell)
    amp = rng.normal(size=len(labels)) + 1j * rng.normal(size=len(labels))
    return PureState.from_labels(labels, amp / np.linalg.norm(amp))


def _ladder(ell):
    """(Jz, J+) 행렬 (m 오름차순)"""
    ms = np.arange(-ell, ell + 1)
    jz = np.diag(ms).astype(float)
    jp = np.zeros((ms.size, ms.size))
    for i, m in enumerate(ms[:-1]):
        jp[i + 1, i] = math.sqrt(ell * (ell + 1) - m * (m + 1))
    return jz, jp


class TestPhaseConvention:
    """위상 규약"""

    def test_parse(self):
        assert PhaseConvention.parse("ll") is PhaseConvention.LANDAU_LIFSHITZ
        assert PhaseConvention.parse(" SAKURAI ") is PhaseConvention.SAKURAI
        assert PhaseConvention.parse(PhaseConvention.SAKURAI) is PhaseConvention.SAKURAI

    def test_parse_unknown(self):
        with pytest.raises(ValidationError):
            PhaseConvention.parse("condon")

    def test_phases(self):
        assert TimeReversal.phase_sign(2, 1, PhaseConvention.LANDAU_LIFSHITZ) == -1
        assert TimeReversal.phase_sign(2, 0, PhaseConvention.LANDAU_LIFSHITZ) == 1
        assert TimeReversal.phase_sign(1, 0, PhaseConvention.LANDAU_LIFSHITZ) == -1
        assert TimeReversal.phase_sign(1, 0, PhaseConvention.SAKURAI) == 1
        assert TimeReversal.tr_phase(3, -1, PhaseConvention.SAKURAI) == pytest.approx(-math.pi)

    @pytest.mark.parametrize("ell,m,conv,expected", [
        (1, 1, PhaseConvention.LANDAU_LIFSHITZ, 0.0),
        (1, 0, PhaseConvention.LANDAU_LIFSHITZ, math.pi),
        (2, 1, PhaseConvention.SAKURAI, math.pi),
    ])
    def test_tr_phase_values(self, ell, m, conv, expected):
        assert TimeReversal.tr_phase(ell, m, conv) == pytest.approx(expected)

    def test_phase_invalid_label(self):
        with pytest.raises(InvalidLabel):
            TimeReversal.tr_phase(1, 2)


class TestLabels:
    """라벨 검증과 표준 라벨"""

    def test_angular_label_range(self):
        with pytest.raises(InvalidLabel):
            AngularLabel(1, 1, 2)
        with pytest.raises(InvalidLabel):
            AngularLabel(0, 1, 0)

    def test_self_conjugate_label_m_zero_minus(self):
        with pytest.raises(InvalidLabel):
            SelfConjLabel(1, 2, 0, '-')

    def test_self_conjugate_label_negative_m(self):
        with pytest.raises(InvalidLabel):
            SelfConjLabel(1, 2, -1, '+')

    def test_standard_labels(self):
        labels = SelfConjLabel.standard_labels(3)
        assert labels[0] == SelfConjLabel(1, 0, 0, '+')
        assert labels[1] == SelfConjLabel(1, 1, 0, '+')
        assert labels[2] == SelfConjLabel(2, 1, 0, '+')
        assert labels == sorted(labels, key=lambda label: label.sort_key())


class TestPureState:
    """순수 상태 불변식"""

    def test_from_labels_sorts(self):
        psi = PureState.from_labels([AngularLabel(1, 1, 1), AngularLabel(1, 1, -1)], [0.6, 0.8])
        assert psi.labels == (AngularLabel(1, 1, -1), AngularLabel(1, 1, 1))
        assert psi.amp[0] == pytest.approx(0.8)

    def test_unsorted_rejected(self):
        with pytest.raises(ValidationError):
            PureState(Basis.ANGULAR, (AngularLabel(1, 1, 1), AngularLabel(1, 1, -1)), [0.6, 0.8])

    def test_duplicate_rejected(self):
        with pytest.raises(ValidationError):
            PureState.from_labels([AngularLabel(1, 1, 1), AngularLabel(1, 1, 1)], [0.6, 0.8])

    def test_count_mismatch(self):
        with pytest.raises(DimensionError):
            PureState(Basis.ANGULAR, (AngularLabel(1, 1, 1),), [0.6, 0.8])

    def test_mixed_basis_rejected(self):
        with pytest.raises(BasisError):
            PureState.from_labels([AngularLabel(1, 1, 1), SelfConjLabel(1, 1, 1, '+')], [0.6, 0.8])

    def test_normalization(self):
        psi = PureState.self_conjugate([1.0, 1.0])
        with pytest.raises(NormalizationError):
            psi.check_normalized()
        psi.normalized().check_normalized()


class TestClebschGordan:
    """Clebsch-Gordan 계수"""

    def test_known_value(self):
        assert ClebschGordan.clebsch_gordan(1, 0, 1, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3), abs=1e-15)
        assert ClebschGordan.clebsch_gordan(1, 1, 1, -1, 2, 0) == pytest.approx(1 / math.sqrt(6), abs=1e-15)

    def test_selection_rules(self):
        assert ClebschGordan.clebsch_gordan(1, 1, 1, 1, 2, 1) == 0.0
        assert ClebschGordan.clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0

    @pytest.mark.parametrize("l1", range(3))
    @pytest.mark.parametrize("l2", range(3))
    def test_matches_sympy(self, l1, l2):
        _, pairs, coupled = ClebschGordan.coupling_matrix(l1, l2)
        for m1, m2 in pairs:
            for L, M in coupled:
                expected = float(CG(l1, m1, l2, m2, L, M).doit())
                assert ClebschGordan.clebsch_gordan(l1, m1, l2, m2, L, M) == pytest.approx(expected, abs=1e-12)

    def test_sign_identity(self):
        for l1 in range(5):
            for l2 in range(5):
                _, pairs, coupled = ClebschGordan.coupling_matrix(l1, l2)
                for m1, m2 in pairs:
                    for L, M in coupled:
                        left = ClebschGordan.clebsch_gordan(l1, m1, l2, m2, L, M)
                        right = (-1) ** (l1 + l2 - L) * ClebschGordan.clebsch_gordan(l1, -m1, l2, -m2, L, -M)
                        assert abs(left - right) <= 1e-12

    @pytest.mark.parametrize("l1,l2", [(0, 2), (1, 1), (1, 2), (2, 3)])
    def test_coupling_matrix_eigenvectors(self, l1, l2):
        matrix, _, coupled = ClebschGordan.coupling_matrix(l1, l2)
        assert np.allclose(matrix.T @ matrix, np.eye(len(coupled)), atol=1e-12)

        jz1, jp1 = _ladder(l1)
        jz2, jp2 = _ladder(l2)
        eye1, eye2 = np.eye(2 * l1 + 1), np.eye(2 * l2 + 1)
        jz = np.kron(jz1, eye2) + np.kron(eye1, jz2)
        jp = np.kron(jp1, eye2) + np.kron(eye1, jp2)
        j2 = jz @ jz + 0.5 * (jp @ jp.T + jp.T @ jp)
        for j, (L, M) in enumerate(coupled):
            column = matrix[:, j]
            assert np.allclose(j2 @ column, L * (L + 1) * column, atol=1e-12)
            assert np.allclose(jz @ column, M * column, atol=1e-12)

    def test_negative_ell(self):
        with pytest.raises(InvalidLabel):
            ClebschGordan.coupling_matrix(-1, 1)


class TestTimeReversal:
    """시간 반전과 자기켤레 기저"""

    @pytest.mark.parametrize("conv", list(PhaseConvention))
    def test_self_conjugate_fixed_points(self, conv):
        for ell in range(5):
            rows = _angular_multiplet(ell)
            unitary, columns = TimeReversal.self_conjugate_transform(rows, conv)
            assert np.allclose(unitary.conj().T @ unitary, np.eye(len(columns)), atol=1e-12)
            for j in range(len(columns)):
                vec = PureState(Basis.ANGULAR, tuple(rows), unitary[:, j])
                assert vec.distance(TimeReversal.apply_time_reversal(vec, conv)) <= 1e-12

    def test_ll_dipole_columns(self):
        rows = [AngularLabel(1, 1, -1), AngularLabel(1, 1, 1)]
        unitary, columns = TimeReversal.self_conjugate_transform(rows)
        assert columns == [SelfConjLabel(1, 1, 1, '+'), SelfConjLabel(1, 1, 1, '-')]
        s = 1 / math.sqrt(2)
        assert np.allclose(unitary[:, 0], [s, s])
        assert np.allclose(unitary[:, 1], [1j * s, -1j * s])

    @pytest.mark.parametrize("conv", list(PhaseConvention))
    def test_mirror_amplitude_conditions(self, conv):
        for ell in range(1, 5):
            rows = _angular_multiplet(ell)
            index = {label: i for i, label in enumerate(rows)}
            unitary, columns = TimeReversal.self_conjugate_transform(rows, conv)
            for j, e in enumerate(columns):
                if e.m == 0:
                    continue
                plus = unitary[index[AngularLabel(e.mu, ell, e.m)], j]
                minus = unitary[index[AngularLabel(e.mu, ell, -e.m)], j]
                assert abs(plus) == pytest.approx(abs(minus), abs=1e-15)
                # arg ψ_m + arg ψ_{−m} = θ_{ℓm} (mod 2π)
                phase = np.angle(plus) + np.angle(minus) - TimeReversal.tr_phase(ell, e.m, conv)
                assert abs(np.exp(1j * phase) - 1) <= 1e-12

    def test_incomplete_space(self):
        with pytest.raises(IncompleteSpace):
            TimeReversal.self_conjugate_transform([AngularLabel(1, 1, 1), AngularLabel(1, 1, 0)])

    @pytest.mark.parametrize("conv", list(PhaseConvention))
    def test_applied_twice_is_identity(self, conv):
        rng = np.random.default_rng(3)
        psi = _random_angular(rng, 3)
        twice = TimeReversal.apply_time_reversal(TimeReversal.apply_time_reversal(psi, conv), conv)
        assert psi.distance(twice) <= 1e-12

    def test_antilinear(self):
        psi = PureState.basis_state(AngularLabel(1, 2, 1))
        out = TimeReversal.apply_time_reversal(psi.scaled(1j))
        assert out.labels == (AngularLabel(1, 2, -1),)
        # e^{iπ(2−1)} · (−i)
        assert out.amp[0] == pytest.approx(1j)

    @pytest.mark.parametrize("conv", list(PhaseConvention))
    def test_round_trip(self, conv):
        rng = np.random.default_rng(11)
        for ell in range(4):
            psi = _random_angular(rng, ell)
            sc = TimeReversal.to_self_conjugate(psi, conv)
            assert sc.basis is Basis.SELF_CONJUGATE
            assert psi.distance(TimeReversal.to_angular(sc, conv)) <= 1e-12

    @pytest.mark.parametrize("conv", list(PhaseConvention))
    def test_conjugation_in_self_conjugate_basis(self, conv):
        rng = np.random.default_rng(5)
        psi = _random_angular(rng, 2)
        via_angular = TimeReversal.to_self_conjugate(TimeReversal.apply_time_reversal(psi, conv), conv)
        via_conjugate = TimeReversal.apply_self_conjugate(TimeReversal.to_self_conjugate(psi, conv))
        assert via_angular.distance(via_conjugate) <= 1e-12

    def test_self_conjugate_requires_angular(self):
        with pytest.raises(BasisError):
            TimeReversal.apply_time_reversal(PureState.self_conjugate([1.0]))

    def test_ll_product_factorization(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            left = _random_angular(rng, int(rng.integers(0, 4)))
            right = _random_angular(rng, int(rng.integers(0, 4)))
            product = AngularCoupling.tensor(left, right)
            coupled = TimeReversal.apply_time_reversal(product, PhaseConvention.LANDAU_LIFSHITZ)
            factorwise = TimeReversal.apply_factorwise(product, PhaseConvention.LANDAU_LIFSHITZ)
            assert coupled.distance(factorwise) <= 1e-12

    def test_sakurai_product_counterexample(self):
        witness = PureState.basis_state(ProductLabel((AngularLabel(1, 1, 0), AngularLabel(1, 1, 1))))
        conv = PhaseConvention.SAKURAI
        coupled = TimeReversal.apply_time_reversal(witness, conv)
        factorwise = TimeReversal.apply_factorwise(witness, conv)
        assert coupled.fidelity(factorwise) < 1.0 - 1e-6
        assert coupled.norm == pytest.approx(1.0)

    @staticmethod
    def _entangled(rng, l1, l2):
        labels = [ProductLabel((a, b)) for a in _angular_multiplet(l1) for b in _angular_multiplet(l2)]
        amp = rng.normal(size=len(labels)) + 1j * rng.normal(size=len(labels))
        return PureState.from_labels(labels, amp / np.linalg.norm(amp))

    @pytest.mark.parametrize("conv", list(PhaseConvention))
    def test_product_state_to_self_conjugate(self, conv):
        rng = np.random.default_rng(21)
        states = [
            AngularCoupling.tensor(_random_angular(rng, 2), _random_angular(rng, 1)),
            self._entangled(rng, 1, 1),
            self._entangled(rng, 2, 0),
        ]
        for psi in states:
            sc = TimeReversal.to_self_conjugate(psi, conv)
            assert sc.basis is Basis.SELF_CONJUGATE
            assert sc.norm == pytest.approx(1.0, abs=1e-12)
            via_angular = TimeReversal.to_self_conjugate(TimeReversal.apply_time_reversal(psi, conv), conv)
            assert via_angular.distance(TimeReversal.apply_self_conjugate(sc)) <= 1e-12

    @pytest.mark.parametrize("conv", list(PhaseConvention))
    def test_product_overlap_matches_time_reversal(self, conv):
        rng = np.random.default_rng(4)
        psi = self._entangled(rng, 1, 2)
        left, right = psi.aligned(TimeReversal.apply_time_reversal(psi, conv))
        sc = TimeReversal.to_self_conjugate(psi, conv)
        assert abs(np.sum(sc.amp ** 2)) == pytest.approx(abs(np.vdot(right, left)), abs=1e-12)

    def test_ll_product_round_trip(self):
        rng = np.random.default_rng(8)
        psi = AngularCoupling.tensor(
            AngularCoupling.tensor(_random_angular(rng, 1), _random_angular(rng, 0)),
            PureState.basis_state(AngularLabel(1, 2, 1)),
        )
        sc = TimeReversal.to_self_conjugate(psi)
        assert all(isinstance(label, ProductLabel) for label in sc.labels)
        assert psi.distance(TimeReversal.to_angular(sc)) <= 1e-12

    def test_sakurai_three_factor_product(self):
        one = PureState.basis_state(AngularLabel(1, 1, 1))
        psi = AngularCoupling.tensor(AngularCoupling.tensor(one, one), one)
        with pytest.raises(BasisError):
            TimeReversal.to_self_conjugate(psi, PhaseConvention.SAKURAI)

    def test_is_invariant(self):
        assert TimeReversal.is_invariant(PureState.basis_state(AngularLabel(1, 1, 0)))
        assert not TimeReversal.is_invariant(PureState.basis_state(AngularLabel(1, 1, 1)))
        assert TimeReversal.is_invariant(PureState.self_conjugate(np.array([0.6, 0.8]) * 1j))


class TestAngularCoupling:
    """텐서곱과 표준 큐비트 결합"""

    def test_tensor_labels(self):
        a = PureState.self_conjugate([0.6, 0.8])
        b = PureState.self_conjugate([1.0, 0.0, 0.0])
        product = AngularCoupling.tensor(a, b)
        assert product.dim == 6
        assert all(isinstance(label, ProductLabel) for label in product.labels)
        triple = AngularCoupling.tensor(product, a)
        assert len(triple.labels[0].factors) == 3

    def test_tensor_basis_mismatch(self):
        with pytest.raises(BasisError):
            AngularCoupling.tensor(PureState.self_conjugate([1.0]), PureState.basis_state(AngularLabel(1, 0, 0)))

    def test_couple_zero_angular_momentum(self):
        psi = PureState.basis_state(AngularCoupling.QUBIT_ZERO)
        out = AngularCoupling.couple_standard_qubit(psi, 1)
        assert out.labels == (SelfConjLabel(1, 1, 0, '+'),)
        assert out.amp[0] == pytest.approx(1.0)

    def test_couple_preserves_norm(self):
        psi = PureState.basis_state(SelfConjLabel(1, 2, 0, '+'))
        out = AngularCoupling.couple_standard_qubit(psi, 1)
        assert [label.ell for label in out.labels] == [1, 3]
        assert np.allclose(out.amp, [math.sqrt(2 / 5), math.sqrt(3 / 5)])
        assert out.norm == pytest.approx(1.0)

    def test_couple_dipole(self):
        out = AngularCoupling.couple_standard_qubit(PureState.basis_state(AngularCoupling.QUBIT_ONE), 1)
        assert [label.ell for label in out.labels] == [0, 2]
        assert np.allclose(out.amp, [math.sqrt(1 / 3), math.sqrt(2 / 3)])

    def test_couple_norm_random(self):
        rng = np.random.default_rng(17)
        labels = [SelfConjLabel(1, ell, 0, '+') for ell in range(7)]
        amp = rng.normal(size=7) + 1j * rng.normal(size=7)
        psi = PureState.from_labels(labels, amp / np.linalg.norm(amp))
        for qubit in (0, 1):
            assert AngularCoupling.couple_standard_qubit(psi, qubit).norm == pytest.approx(1.0, abs=1e-12)

    def test_couple_qubit_state_orthogonal_branches(self):
        counter = MultiplicityCounter()
        psi = PureState.self_conjugate([0.6, 0.8])
        out = AngularCoupling.couple_qubit_state(psi, 1 / math.sqrt(2), 1j / math.sqrt(2), counter)
        assert out.norm == pytest.approx(1.0)
        assert len(set(out.labels)) == out.dim

    def test_couple_rejects_unsupported(self):
        psi = PureState.basis_state(SelfConjLabel(1, 2, 1, '-'))
        with pytest.raises(BasisError):
            AngularCoupling.couple_standard_qubit(psi, 1)
        with pytest.raises(BasisError):
            AngularCoupling.couple_standard_qubit(PureState.basis_state(AngularCoupling.QUBIT_ZERO), 2)
