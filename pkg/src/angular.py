"""
각운동량 힐베르트 공간과 시간 반전(TR) 연산자
위상 규약, 자기켤레 기저, Clebsch-Gordan 결합 포함
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial, sqrt
from typing import ClassVar, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import DEFAULT_TOLERANCE
from src.errors import (
    BasisError,
    DimensionError,
    IncompleteSpace,
    InvalidLabel,
    NormalizationError,
    ValidationError,
)
from src.validator import Validator

logger = logging.getLogger(__name__)


class PhaseConvention(Enum):
    """TR 위상 θ_{ℓm} 규약"""
    LANDAU_LIFSHITZ = 'll'
    SAKURAI = 'sakurai'

    @staticmethod
    def parse(value: Union[str, "PhaseConvention"]) -> "PhaseConvention":
        """
        문자열을 위상 규약으로 변환

        Args:
            value: 'll', 'sakurai' 또는 PhaseConvention

        Returns:
            PhaseConvention

        Raises:
            ValidationError: 알 수 없는 규약
        """
        if isinstance(value, PhaseConvention):
            return value
        key = str(value).strip().lower()
        for convention in PhaseConvention:
            if convention.value == key:
                return convention
        raise ValidationError(f"알 수 없는 위상 규약: {value}", "'ll' 또는 'sakurai'")

    def half_turns(self, ell: int, m: int) -> int:
        """θ_{ℓm} / π (정수)"""
        if self is PhaseConvention.LANDAU_LIFSHITZ:
            return ell - m
        return m


class Basis(Enum):
    """상태 벡터의 기저 종류"""
    ANGULAR = 'angular'
    SELF_CONJUGATE = 'self-conjugate'


@dataclass(frozen=True)
class AngularLabel:
    """물리 기저 켓 |μ ℓ m⟩"""
    mu: int
    ell: int
    m: int

    basis: ClassVar[Basis] = Basis.ANGULAR

    def __post_init__(self):
        if self.mu < 1 or self.ell < 0 or abs(self.m) > self.ell:
            raise InvalidLabel(self.ell, self.m, f"μ={self.mu}")

    def sort_key(self) -> Tuple[int, int, int, int]:
        return (self.ell, self.m, 0, self.mu)

    def mirrored(self) -> "AngularLabel":
        """m → −m"""
        return AngularLabel(self.mu, self.ell, -self.m)

    def __str__(self) -> str:
        return f"|{self.mu},{self.ell},{self.m}⟩"


@dataclass(frozen=True)
class SelfConjLabel:
    """자기켤레 기저 켓 |e_n⟩ = |μ ℓ m ε⟩ (TR 의 고정점)"""
    mu: int
    ell: int
    m: int
    eps: str = '+'

    basis: ClassVar[Basis] = Basis.SELF_CONJUGATE

    def __post_init__(self):
        if self.mu < 1 or self.ell < 0 or not 0 <= self.m <= self.ell:
            raise InvalidLabel(self.ell, self.m, "자기켤레 라벨은 0 ≤ m ≤ ℓ")
        if self.eps not in ('+', '-'):
            raise ValidationError(f"ε 는 '+' 또는 '-' 이어야 합니다: {self.eps!r}")
        if self.m == 0 and self.eps != '+':
            raise InvalidLabel(self.ell, self.m, "m=0 이면 ε='+'")

    def sort_key(self) -> Tuple[int, int, int, int]:
        return (self.ell, self.m, 0 if self.eps == '+' else 1, self.mu)

    @staticmethod
    def standard_labels(dim: int) -> List["SelfConjLabel"]:
        """
        차원 dim 의 표준 자기켤레 라벨 목록

        첫 두 라벨은 표준 큐비트 |0⟩ = |1,0,0,+⟩, |1⟩ = |1,1,0,+⟩ 이고
        나머지는 ℓ=1, m=0 의 다중도 μ=2, 3, ... 로 채운다.
        """
        if dim < 1:
            raise DimensionError(f"차원은 1 이상이어야 합니다: {dim}")
        labels = [SelfConjLabel(1, 0, 0, '+')]
        labels.extend(SelfConjLabel(mu, 1, 0, '+') for mu in range(1, dim))
        return labels

    def __str__(self) -> str:
        return f"|e {self.mu},{self.ell},{self.m},{self.eps}⟩"


@dataclass(frozen=True)
class ProductLabel:
    """텐서곱 기저 켓 (인자 라벨의 튜플)"""
    factors: Tuple[Union[AngularLabel, SelfConjLabel], ...]

    def __post_init__(self):
        if len(self.factors) < 2:
            raise ValidationError("곱 라벨은 인자가 2개 이상이어야 합니다")
        kinds = {type(f) for f in self.factors}
        if len(kinds) != 1:
            raise BasisError("단일 기저 인자", "혼합 기저 인자")

    @property
    def basis(self) -> Basis:
        return self.factors[0].basis

    def sort_key(self) -> Tuple[Tuple[int, int, int, int], ...]:
        return tuple(f.sort_key() for f in self.factors)

    def __str__(self) -> str:
        return "⊗".join(str(f) for f in self.factors)


Label = Union[AngularLabel, SelfConjLabel, ProductLabel]


def _label_kind(label: Label) -> Tuple[Basis, int]:
    """(기저, 인자 수) - 한 상태 안의 라벨은 모두 같아야 함"""
    if isinstance(label, ProductLabel):
        return (label.basis, len(label.factors))
    return (label.basis, 1)


@dataclass(frozen=True, eq=False)
class PureState:
    """
    정규화된 순수 상태 (라벨 목록 + 복소 진폭)

    Attributes:
        basis: 기저 종류
        labels: 정렬된 라벨 튜플 (ℓ, m, ε(+ 먼저), μ 순)
        amp: 복소 진폭 벡터
    """
    basis: Basis
    labels: Tuple[Label, ...]
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=complex).reshape(-1)
        object.__setattr__(self, 'amp', amp)
        object.__setattr__(self, 'labels', tuple(self.labels))

        if len(self.labels) != amp.size:
            raise DimensionError(f"라벨 수({len(self.labels)})와 진폭 수({amp.size})가 다릅니다")
        if not self.labels:
            raise DimensionError("빈 상태는 허용되지 않습니다")

        kinds = {_label_kind(label) for label in self.labels}
        if len(kinds) != 1:
            raise BasisError("단일 라벨 종류", "혼합 라벨")
        kind_basis = next(iter(kinds))[0]
        if kind_basis is not self.basis:
            raise BasisError(self.basis.value, kind_basis.value)

        keys = [label.sort_key() for label in self.labels]
        if len(set(keys)) != len(keys):
            raise ValidationError("라벨이 중복되었습니다")
        if keys != sorted(keys):
            raise ValidationError("라벨이 표준 순서가 아닙니다", "PureState.from_mapping 을 사용하세요")

    @property
    def dim(self) -> int:
        return self.amp.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def check_normalized(self, tolerance: float = DEFAULT_TOLERANCE) -> None:
        """
        정규화 검증

        Raises:
            NormalizationError: |‖ψ‖ − 1| > tolerance
        """
        if abs(self.norm - 1.0) > tolerance:
            raise NormalizationError(self.norm, tolerance)

    def normalized(self) -> "PureState":
        norm = self.norm
        if norm == 0.0:
            raise NormalizationError(0.0, DEFAULT_TOLERANCE)
        return PureState(self.basis, self.labels, self.amp / norm)

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self.basis, self.labels, self.amp * factor)

    def with_amplitudes(self, amp: np.ndarray) -> "PureState":
        return PureState(self.basis, self.labels, amp)

    def as_mapping(self) -> Dict[Label, complex]:
        return {label: complex(a) for label, a in zip(self.labels, self.amp)}

    def embedded(self, labels: Iterable[Label]) -> "PureState":
        """라벨 집합을 확장 (새 라벨의 진폭은 0)"""
        mapping: Dict[Label, complex] = {label: 0j for label in labels}
        mapping.update(self.as_mapping())
        return PureState.from_mapping(self.basis, mapping)

    @staticmethod
    def from_mapping(basis: Basis, mapping: Dict[Label, complex]) -> "PureState":
        """라벨 → 진폭 사전에서 표준 순서의 상태 생성"""
        labels = sorted(mapping.keys(), key=lambda label: label.sort_key())
        amp = np.array([mapping[label] for label in labels], dtype=complex)
        return PureState(basis, tuple(labels), amp)

    @staticmethod
    def from_labels(labels: Sequence[Label], amplitudes: Sequence[complex]) -> "PureState":
        """임의 순서의 (라벨, 진폭) 목록에서 상태 생성"""
        if len(labels) != len(amplitudes):
            raise DimensionError(f"라벨 수({len(labels)})와 진폭 수({len(amplitudes)})가 다릅니다")
        if not labels:
            raise DimensionError("빈 상태는 허용되지 않습니다")
        mapping: Dict[Label, complex] = {}
        for label, a in zip(labels, amplitudes):
            if label in mapping:
                raise ValidationError(f"라벨이 중복되었습니다: {label}")
            mapping[label] = complex(a)
        return PureState.from_mapping(_label_kind(labels[0])[0], mapping)

    @staticmethod
    def basis_state(label: Label) -> "PureState":
        return PureState(_label_kind(label)[0], (label,), np.array([1.0 + 0j]))

    @staticmethod
    def self_conjugate(amplitudes: Sequence[complex]) -> "PureState":
        """표준 자기켤레 라벨 위의 상태 (진폭 순서 그대로)"""
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return PureState(Basis.SELF_CONJUGATE, tuple(SelfConjLabel.standard_labels(amp.size)), amp)

    def aligned(self, other: "PureState") -> Tuple[np.ndarray, np.ndarray]:
        """두 상태를 라벨 합집합 위의 벡터로 정렬"""
        if self.basis is not other.basis:
            raise BasisError(self.basis.value, other.basis.value)
        union = set(self.labels) | set(other.labels)
        left = self.embedded(union)
        right = other.embedded(union)
        return left.amp, right.amp

    def distance(self, other: "PureState") -> float:
        """최대 진폭 차이 (전역 위상 포함)"""
        left, right = self.aligned(other)
        return float(np.max(np.abs(left - right)))

    def fidelity(self, other: "PureState") -> float:
        """|⟨ψ|φ⟩| (전역 위상 무시)"""
        left, right = self.aligned(other)
        return float(abs(np.vdot(left, right)))


class ClebschGordan:
    """실수 Clebsch-Gordan 계수 (Condon-Shortley 위상)"""

    @staticmethod
    @lru_cache(maxsize=None)
    def clebsch_gordan(l1: int, m1: int, l2: int, m2: int, L: int, M: int) -> float:
        """
        Clebsch-Gordan 계수 (ℓ₁m₁; ℓ₂m₂ | L M)

        Racah 공식을 유리수로 정확히 계산한 뒤 마지막에만 부동소수로 변환한다.
        범위 밖이거나 선택 규칙을 어기면 0.

        Args:
            l1, m1: 첫째 각운동량과 z 성분
            l2, m2: 둘째 각운동량과 z 성분
            L, M: 결합 각운동량과 z 성분

        Returns:
            실수 계수
        """
        if min(l1, l2, L) < 0 or abs(m1) > l1 or abs(m2) > l2 or abs(M) > L:
            return 0.0
        if M != m1 + m2:
            return 0.0
        if L < abs(l1 - l2) or L > l1 + l2:
            return 0.0

        prefactor = Fraction(
            (2 * L + 1) * factorial(L + l1 - l2) * factorial(L - l1 + l2) * factorial(l1 + l2 - L),
            factorial(l1 + l2 + L + 1)
        )
        prefactor *= (factorial(L + M) * factorial(L - M) * factorial(l1 - m1) * factorial(l1 + m1)
                      * factorial(l2 - m2) * factorial(l2 + m2))

        k_min = max(0, l2 - L - m1, l1 - L + m2)
        k_max = min(l1 + l2 - L, l1 - m1, l2 + m2)
        total = Fraction(0)
        for k in range(k_min, k_max + 1):
            denominator = (factorial(k) * factorial(l1 + l2 - L - k) * factorial(l1 - m1 - k)
                           * factorial(l2 + m2 - k) * factorial(L - l2 + m1 + k)
                           * factorial(L - l1 - m2 + k))
            total += Fraction((-1) ** k, denominator)

        if total == 0:
            return 0.0
        # 부호는 합에서, 크기는 sqrt(prefactor · total²) 에서
        magnitude = sqrt(float(prefactor * total * total))
        return magnitude if total > 0 else -magnitude

    @staticmethod
    @lru_cache(maxsize=None)
    def _coupling(l1: int, l2: int) -> Tuple[np.ndarray, Tuple[Tuple[int, int], ...], Tuple[Tuple[int, int], ...]]:
        pairs = tuple((m1, m2) for m1 in range(-l1, l1 + 1) for m2 in range(-l2, l2 + 1))
        coupled = tuple((L, M) for L in range(abs(l1 - l2), l1 + l2 + 1) for M in range(-L, L + 1))
        matrix = np.zeros((len(pairs), len(coupled)))
        for i, (m1, m2) in enumerate(pairs):
            for j, (L, M) in enumerate(coupled):
                if M == m1 + m2:
                    matrix[i, j] = ClebschGordan.clebsch_gordan(l1, m1, l2, m2, L, M)
        matrix.setflags(write=False)
        return matrix, pairs, coupled

    @staticmethod
    def coupling_matrix(l1: int, l2: int) -> Tuple[np.ndarray, List[Tuple[int, int]], List[Tuple[int, int]]]:
        """
        |ℓ₁m₁⟩|ℓ₂m₂⟩ → |L M⟩ 기저 변환 행렬

        Args:
            l1, l2: 결합할 두 각운동량

        Returns:
            (C, 곱 기저 (m₁, m₂) 목록, 결합 기저 (L, M) 목록)
            C[i, j] = (ℓ₁m₁; ℓ₂m₂ | L M), 실수 직교 행렬
        """
        if l1 < 0 or l2 < 0:
            raise InvalidLabel(min(l1, l2), 0, "ℓ 은 음이 아닌 정수")
        matrix, pairs, coupled = ClebschGordan._coupling(l1, l2)
        return matrix, list(pairs), list(coupled)


class TimeReversal:
    """반유니터리 시간 반전 연산자 θ̂"""

    @staticmethod
    def tr_phase(ell: int, m: int, conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> float:
        """
        TR 위상 θ_{ℓm} (라디안)

        Args:
            ell: 각운동량
            m: z 성분
            conv: 위상 규약 (LL: π(ℓ−m), Sakurai: πm)

        Returns:
            π 의 정수배

        Raises:
            InvalidLabel: |m| > ℓ
        """
        if ell < 0 or abs(m) > ell:
            raise InvalidLabel(ell, m)
        return np.pi * PhaseConvention.parse(conv).half_turns(ell, m)

    @staticmethod
    def phase_sign(ell: int, m: int, conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> int:
        """e^{iθ_{ℓm}} = ±1 (정확한 정수)"""
        if ell < 0 or abs(m) > ell:
            raise InvalidLabel(ell, m)
        return -1 if PhaseConvention.parse(conv).half_turns(ell, m) % 2 else 1

    @staticmethod
    def _half_phase(ell: int, m: int, conv: PhaseConvention) -> complex:
        """e^{iθ_{ℓm}/2} (정확한 4제곱근)"""
        return (1 + 0j, 1j, -1 + 0j, -1j)[conv.half_turns(ell, m) % 4]

    @staticmethod
    def apply_time_reversal(psi: PureState,
                            conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> PureState:
        """
        물리 기저의 상태에 θ̂ 적용

        Σ ψ_{μℓm}|μℓm⟩ ↦ Σ ψ*_{μℓm} e^{iθ_{ℓm}}|μℓ −m⟩.
        두 인자 곱 상태는 결합 기저 |(μℓ)(μ′ℓ′) L M⟩ 에서 θ_{LM} 으로 작용한다.

        Args:
            psi: 물리(Angular) 기저 상태
            conv: 위상 규약

        Returns:
            TR 된 상태

        Raises:
            BasisError: 자기켤레 기저 또는 3인자 이상 곱 상태
        """
        conv = PhaseConvention.parse(conv)
        if psi.basis is not Basis.ANGULAR:
            raise BasisError(Basis.ANGULAR.value, psi.basis.value)

        first = psi.labels[0]
        if isinstance(first, ProductLabel):
            if len(first.factors) != 2:
                raise BasisError("2인자 곱 상태", f"{len(first.factors)}인자 곱 상태")
            return TimeReversal._apply_coupled(psi, conv)

        mapping: Dict[Label, complex] = {}
        for label, a in zip(psi.labels, psi.amp):
            mapping[label.mirrored()] = np.conj(a) * TimeReversal.phase_sign(label.ell, label.m, conv)
        return PureState.from_mapping(Basis.ANGULAR, mapping)

    @staticmethod
    def apply_factorwise(psi: PureState,
                         conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> PureState:
        """각 텐서 인자에 θ̂ 를 따로 적용 (θ̂ψ ⊗ θ̂φ ⊗ ...)"""
        conv = PhaseConvention.parse(conv)
        if psi.basis is not Basis.ANGULAR:
            raise BasisError(Basis.ANGULAR.value, psi.basis.value)

        mapping: Dict[Label, complex] = {}
        for label, a in zip(psi.labels, psi.amp):
            factors = label.factors if isinstance(label, ProductLabel) else (label,)
            sign = 1
            for f in factors:
                sign *= TimeReversal.phase_sign(f.ell, f.m, conv)
            mirrored = tuple(f.mirrored() for f in factors)
            target = ProductLabel(mirrored) if isinstance(label, ProductLabel) else mirrored[0]
            mapping[target] = np.conj(a) * sign
        return PureState.from_mapping(Basis.ANGULAR, mapping)

    @staticmethod
    def _coupled_groups(psi: PureState) -> Dict[Tuple[int, int, int, int], Dict[Tuple[int, int], complex]]:
        """2인자 곱 상태의 진폭을 (μ₁, ℓ₁, μ₂, ℓ₂) 별 {(m₁, m₂): a} 로 묶음"""
        groups: Dict[Tuple[int, int, int, int], Dict[Tuple[int, int], complex]] = {}
        for label, a in zip(psi.labels, psi.amp):
            left, right = label.factors
            key = (left.mu, left.ell, right.mu, right.ell)
            groups.setdefault(key, {})[(left.m, right.m)] = complex(a)
        return groups

    @staticmethod
    def _apply_coupled(psi: PureState, conv: PhaseConvention) -> PureState:
        mapping: Dict[Label, complex] = {}
        for (mu1, l1, mu2, l2), amps in TimeReversal._coupled_groups(psi).items():
            matrix, pairs, coupled = ClebschGordan.coupling_matrix(l1, l2)
            vec = np.array([amps.get(p, 0j) for p in pairs], dtype=complex)
            c = matrix.T @ vec

            index = {lm: j for j, lm in enumerate(coupled)}
            c_out = np.zeros_like(c)
            for j, (L, M) in enumerate(coupled):
                c_out[index[(L, -M)]] += np.conj(c[j]) * TimeReversal.phase_sign(L, M, conv)

            for (m1, m2), a in zip(pairs, matrix @ c_out):
                label = ProductLabel((AngularLabel(mu1, l1, m1), AngularLabel(mu2, l2, m2)))
                mapping[label] = a
        return PureState.from_mapping(Basis.ANGULAR, mapping)

    @staticmethod
    def apply_self_conjugate(psi: PureState) -> PureState:
        """자기켤레 기저에서의 θ̂ : 진폭의 복소켤레"""
        if psi.basis is not Basis.SELF_CONJUGATE:
            raise BasisError(Basis.SELF_CONJUGATE.value, psi.basis.value)
        return psi.with_amplitudes(np.conj(psi.amp))

    @staticmethod
    def self_conjugate_transform(labels: Sequence[AngularLabel],
                                 conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ
                                 ) -> Tuple[np.ndarray, List[SelfConjLabel]]:
        """
        물리 기저 위의 자기켤레 기저 벡터

        |e_{μℓ0+}⟩ = e^{iθ_{ℓ0}/2}|μℓ0⟩
        |e_{μℓm+}⟩ = (|μℓm⟩ + e^{iθ_{ℓm}}|μℓ −m⟩)/√2
        |e_{μℓm−}⟩ = i(−|μℓm⟩ + e^{iθ_{ℓm}}|μℓ −m⟩)/√2

        Args:
            labels: m ↔ −m 에 대해 닫힌 물리 라벨 목록
            conv: 위상 규약

        Returns:
            (U, 자기켤레 라벨 목록) - U 의 행은 정렬된 물리 라벨, 열은 |e_n⟩

        Raises:
            IncompleteSpace: 라벨 집합이 m ↔ −m 에 대해 닫혀 있지 않음
        """
        conv = PhaseConvention.parse(conv)
        rows = sorted(set(labels), key=lambda label: label.sort_key())
        if any(not isinstance(label, AngularLabel) for label in rows):
            raise BasisError(Basis.ANGULAR.value, "곱 라벨 또는 자기켤레 라벨")
        present = set(rows)
        missing = [str(label.mirrored()) for label in rows if label.mirrored() not in present]
        if missing:
            raise IncompleteSpace(missing)

        columns: List[SelfConjLabel] = []
        for label in rows:
            if label.m == 0:
                columns.append(SelfConjLabel(label.mu, label.ell, 0, '+'))
            elif label.m > 0:
                columns.append(SelfConjLabel(label.mu, label.ell, label.m, '+'))
                columns.append(SelfConjLabel(label.mu, label.ell, label.m, '-'))
        columns.sort(key=lambda label: label.sort_key())

        row_index = {label: i for i, label in enumerate(rows)}
        unitary = np.zeros((len(rows), len(columns)), dtype=complex)
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        for j, e in enumerate(columns):
            if e.m == 0:
                i = row_index[AngularLabel(e.mu, e.ell, 0)]
                unitary[i, j] = TimeReversal._half_phase(e.ell, 0, conv)
                continue
            plus = row_index[AngularLabel(e.mu, e.ell, e.m)]
            minus = row_index[AngularLabel(e.mu, e.ell, -e.m)]
            sign = TimeReversal.phase_sign(e.ell, e.m, conv)
            if e.eps == '+':
                unitary[plus, j] = inv_sqrt2
                unitary[minus, j] = sign * inv_sqrt2
            else:
                unitary[plus, j] = -1j * inv_sqrt2
                unitary[minus, j] = 1j * sign * inv_sqrt2
        return unitary, columns

    @staticmethod
    def _mirror_closure(labels: Iterable[AngularLabel]) -> List[AngularLabel]:
        closed = set()
        for label in labels:
            closed.add(label)
            closed.add(label.mirrored())
        return sorted(closed, key=lambda label: label.sort_key())

    @staticmethod
    def to_self_conjugate(psi: PureState,
                          conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> PureState:
        """
        물리 기저 상태를 자기켤레 기저로 변환 (ψ_n = ⟨e_n|ψ⟩)

        라벨 집합이 닫혀 있지 않으면 거울 라벨을 진폭 0 으로 보충한다.
        곱 상태는 LL 규약에서 인자별 변환의 크로네커 곱을 쓰고 (라벨은 자기켤레 인자의 곱),
        그 밖의 규약에서는 2인자 결합 기저 |L M⟩ 의 자기켤레 벡터를 쓴다.

        Raises:
            BasisError: LL 이 아닌 규약의 3인자 이상 곱 상태
        """
        conv = PhaseConvention.parse(conv)
        if psi.basis is Basis.SELF_CONJUGATE:
            return psi
        if isinstance(psi.labels[0], ProductLabel):
            if conv is PhaseConvention.LANDAU_LIFSHITZ:
                return TimeReversal._product_to_self_conjugate(psi, conv)
            if len(psi.labels[0].factors) != 2:
                raise BasisError("LL 규약 또는 2인자 곱 상태", f"{conv.value} 규약의 {len(psi.labels[0].factors)}인자 곱 상태")
            return TimeReversal._coupled_to_self_conjugate(psi, conv)
        rows = TimeReversal._mirror_closure(psi.labels)
        full = psi.embedded(rows)
        unitary, columns = TimeReversal.self_conjugate_transform(rows, conv)
        return PureState(Basis.SELF_CONJUGATE, tuple(columns), unitary.conj().T @ full.amp)

    @staticmethod
    def _product_transform(slots: List[List[AngularLabel]], conv: PhaseConvention
                           ) -> Tuple[np.ndarray, List[ProductLabel], List[ProductLabel]]:
        """인자별 자기켤레 변환의 크로네커 곱 (행, 열 라벨은 itertools.product 순서)"""
        dim = 1
        for slot in slots:
            dim *= len(slot)
        Validator.check_memory_availability(dim * dim * 16)

        unitary = np.ones((1, 1), dtype=complex)
        columns_per_slot = []
        for slot in slots:
            factor, columns = TimeReversal.self_conjugate_transform(slot, conv)
            unitary = np.kron(unitary, factor)
            columns_per_slot.append(columns)
        rows = [ProductLabel(combo) for combo in product(*slots)]
        columns = [ProductLabel(combo) for combo in product(*columns_per_slot)]
        return unitary, rows, columns

    @staticmethod
    def _product_to_self_conjugate(psi: PureState, conv: PhaseConvention) -> PureState:
        width = len(psi.labels[0].factors)
        slots = [TimeReversal._mirror_closure(label.factors[i] for label in psi.labels) for i in range(width)]
        unitary, rows, columns = TimeReversal._product_transform(slots, conv)
        mapping = psi.as_mapping()
        full = np.array([mapping.get(row, 0j) for row in rows], dtype=complex)
        coefficients = unitary.conj().T @ full
        return PureState.from_mapping(Basis.SELF_CONJUGATE, dict(zip(columns, coefficients)))

    @staticmethod
    def _coupled_to_self_conjugate(psi: PureState, conv: PhaseConvention) -> PureState:
        # 결합 다중항마다 새 다중도 μ 를 부여
        counter: Dict[int, int] = {}
        mapping: Dict[Label, complex] = {}
        for (_, l1, _, l2), amps in sorted(TimeReversal._coupled_groups(psi).items()):
            matrix, pairs, coupled = ClebschGordan.coupling_matrix(l1, l2)
            c = matrix.T @ np.array([amps.get(p, 0j) for p in pairs], dtype=complex)
            index = {lm: j for j, lm in enumerate(coupled)}
            for L in range(abs(l1 - l2), l1 + l2 + 1):
                mu = counter.get(L, 0) + 1
                counter[L] = mu
                rows = [AngularLabel(mu, L, M) for M in range(-L, L + 1)]
                unitary, columns = TimeReversal.self_conjugate_transform(rows, conv)
                block = np.array([c[index[(L, M)]] for M in range(-L, L + 1)])
                mapping.update(zip(columns, unitary.conj().T @ block))
        return PureState.from_mapping(Basis.SELF_CONJUGATE, mapping)

    @staticmethod
    def to_angular(psi: PureState,
                   conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> PureState:
        """
        자기켤레 기저 상태를 물리 기저로 변환

        곱 상태는 LL 규약의 인자별 라벨만 되돌린다.
        """
        conv = PhaseConvention.parse(conv)
        if psi.basis is Basis.ANGULAR:
            return psi
        if isinstance(psi.labels[0], ProductLabel):
            if conv is not PhaseConvention.LANDAU_LIFSHITZ:
                raise BasisError("LL 규약의 곱 상태", f"{conv.value} 규약의 곱 상태")
            width = len(psi.labels[0].factors)
            slots = [
                TimeReversal._mirror_closure(
                    AngularLabel(label.factors[i].mu, label.factors[i].ell, label.factors[i].m)
                    for label in psi.labels
                )
                for i in range(width)
            ]
            unitary, rows, columns = TimeReversal._product_transform(slots, conv)
            mapping = psi.as_mapping()
            coefficients = np.array([mapping.get(e, 0j) for e in columns], dtype=complex)
            return PureState.from_mapping(Basis.ANGULAR, dict(zip(rows, unitary @ coefficients)))
        rows = TimeReversal._mirror_closure(
            AngularLabel(e.mu, e.ell, e.m) for e in psi.labels
        )
        unitary, columns = TimeReversal.self_conjugate_transform(rows, conv)
        mapping = psi.as_mapping()
        coefficients = np.array([mapping.get(e, 0j) for e in columns], dtype=complex)
        return PureState(Basis.ANGULAR, tuple(rows), unitary @ coefficients)

    @staticmethod
    def is_invariant(psi: PureState, conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ,
                     tolerance: float = DEFAULT_TOLERANCE) -> bool:
        """
        비자원(TR 불변) 상태 여부

        자기켤레 기저의 진폭이 전역 위상을 빼고 모두 실수이면 참.
        |Σ ψ_n²| = 1 과 동치.
        """
        sc = TimeReversal.to_self_conjugate(psi, conv)
        sc.check_normalized(tolerance)
        return abs(abs(np.sum(sc.amp * sc.amp)) - 1.0) <= tolerance


class MultiplicityCounter:
    """결합으로 생긴 각운동량에 ℓ 별로 새 다중도 μ 를 순서대로 부여"""

    def __init__(self):
        self._next: Dict[int, int] = {}

    def fresh(self, ell: int) -> SelfConjLabel:
        mu = self._next.get(ell, 1)
        self._next[ell] = mu + 1
        return SelfConjLabel(mu, ell, 0, '+')


class AngularCoupling:
    """텐서곱과 표준 큐비트 결합"""

    # 표준 큐비트 |0⟩, |1⟩
    QUBIT_ZERO = SelfConjLabel(1, 0, 0, '+')
    QUBIT_ONE = SelfConjLabel(1, 1, 0, '+')

    @staticmethod
    def tensor(psi_a: PureState, psi_b: PureState,
               conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> PureState:
        """
        곱 상태 ψ ⊗ φ

        LL 규약에서는 θ̂(ψ⊗φ) = θ̂ψ ⊗ θ̂φ 가 성립한다.

        Args:
            psi_a, psi_b: 같은 기저의 상태
            conv: 곱 상태에 사용할 위상 규약

        Returns:
            곱 라벨 위의 상태 (인자는 평탄화됨)
        """
        conv = PhaseConvention.parse(conv)
        if psi_a.basis is not psi_b.basis:
            raise BasisError(psi_a.basis.value, psi_b.basis.value)
        if conv is not PhaseConvention.LANDAU_LIFSHITZ and psi_a.basis is Basis.ANGULAR:
            logger.warning("%s 규약의 곱 상태에서는 TR 이 인자별로 분해되지 않을 수 있습니다", conv.value)

        def factors(label: Label) -> Tuple:
            return label.factors if isinstance(label, ProductLabel) else (label,)

        labels = tuple(
            ProductLabel(factors(a) + factors(b)) for a in psi_a.labels for b in psi_b.labels
        )
        return PureState(psi_a.basis, labels, np.kron(psi_a.amp, psi_b.amp))

    @staticmethod
    def couple_standard_qubit(psi: PureState, qubit: int,
                              counter: Optional[MultiplicityCounter] = None) -> PureState:
        """
        |μℓ0+⟩ 상태와 표준 큐비트 기저 켓의 결합

        |μℓ0+⟩⊗|0⟩ → |μ′ℓ0+⟩
        |μℓ0+⟩⊗|1⟩ → √(ℓ/(2ℓ+1))|μ′,ℓ−1,0+⟩ + √((ℓ+1)/(2ℓ+1))|μ″,ℓ+1,0+⟩

        Args:
            psi: m=0, ε=+ 자기켤레 라벨 위의 상태
            qubit: 0 또는 1
            counter: 새 다중도 카운터 (여러 번 결합할 때 공유)

        Returns:
            새 다중도를 가진 자기켤레 라벨 위의 상태 (노름 보존)

        Raises:
            BasisError: 지원하지 않는 라벨 또는 큐비트 값
        """
        if qubit not in (0, 1):
            raise BasisError("큐비트 |0⟩ 또는 |1⟩", repr(qubit))
        AngularCoupling._check_standard_support(psi)
        counter = counter if counter is not None else MultiplicityCounter()

        mapping: Dict[Label, complex] = {}
        for label, a in zip(psi.labels, psi.amp):
            ell = label.ell
            if qubit == 0:
                mapping[counter.fresh(ell)] = complex(a)
                continue
            if ell > 0:
                mapping[counter.fresh(ell - 1)] = complex(a) * sqrt(ell / (2 * ell + 1))
            mapping[counter.fresh(ell + 1)] = complex(a) * sqrt((ell + 1) / (2 * ell + 1))
        return PureState.from_mapping(Basis.SELF_CONJUGATE, mapping)

    @staticmethod
    def couple_qubit_state(psi: PureState, c0: complex, c1: complex,
                           counter: Optional[MultiplicityCounter] = None) -> PureState:
        """
        ψ ⊗ (c₀|0⟩ + c₁|1⟩) 를 결합 기저로 표현

        두 가지의 라벨은 같은 카운터에서 나오므로 서로 직교한다.
        """
        counter = counter if counter is not None else MultiplicityCounter()
        zero = AngularCoupling.couple_standard_qubit(psi, 0, counter)
        one = AngularCoupling.couple_standard_qubit(psi, 1, counter)
        mapping = {label: c0 * a for label, a in zip(zero.labels, zero.amp)}
        mapping.update({label: c1 * a for label, a in zip(one.labels, one.amp)})
        return PureState.from_mapping(Basis.SELF_CONJUGATE, mapping)

    @staticmethod
    def _check_standard_support(psi: PureState) -> None:
        if psi.basis is not Basis.SELF_CONJUGATE:
            raise BasisError(Basis.SELF_CONJUGATE.value, psi.basis.value)
        for label in psi.labels:
            if not isinstance(label, SelfConjLabel) or label.m != 0 or label.eps != '+':
                raise BasisError("|μℓ0+⟩ 라벨", str(label))
