"""
프레임성 단조량 τ, τ∞ 와 텐서 거듭제곱
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import comb

from src.angular import (
    AngularCoupling,
    Basis,
    MultiplicityCounter,
    PhaseConvention,
    PureState,
    TimeReversal,
)
from src.config import DEFAULT_TOLERANCE, FEASIBILITY_TOLERANCE
from src.standardform import StandardForm, StandardResource
from src.trio import Trio
from src.validator import Validator

logger = logging.getLogger(__name__)

# 이항 전개 크기 제한
BINOMIAL_MAX_COPIES = 20
# 2ⁿ 차원 곱 기저 오라클 제한
BRUTE_FORCE_MAX_COPIES = 8
# 결합 기저 오라클 제한 (라벨 수가 약 3ⁿ)
COUPLED_MAX_COPIES = 6


@dataclass(frozen=True)
class MonotoneValue:
    """
    단조량 쌍

    Attributes:
        tau: τ ∈ [0, 1]
        tau_inf: τ∞ = −log₂(1 − τ) (θ = π/2 이면 inf)
    """
    tau: float
    tau_inf: float

    @staticmethod
    def from_cos(cos_theta: float) -> "MonotoneValue":
        cos_theta = min(max(float(cos_theta), 0.0), 1.0)
        # cos θ = 0 은 반올림 오차 안에서 판정
        if cos_theta <= FEASIBILITY_TOLERANCE:
            cos_theta = 0.0
        tau_inf = math.inf if cos_theta <= 0.0 else max(0.0, -math.log2(cos_theta))
        return MonotoneValue(tau=1.0 - cos_theta, tau_inf=tau_inf)

    @staticmethod
    def from_theta(theta: float) -> "MonotoneValue":
        return MonotoneValue.from_cos(math.cos(theta))

    @property
    def is_maximal(self) -> bool:
        return math.isinf(self.tau_inf)


@dataclass(frozen=True, eq=False)
class BinomialExpansion:
    """
    |ψ⟩^{⊗n} = Σ_k √r_k |φ_k⟩, r_k = 2^{−n} C(n,k) e^{iθ(n−2k)}

    Attributes:
        theta: 표준 각
        n: 사본 수
        coeffs: r_k (k = 0…n)
    """
    theta: float
    n: int
    coeffs: np.ndarray

    @property
    def total(self) -> complex:
        """Σ r_k = cosⁿθ"""
        return complex(np.sum(self.coeffs))

    @property
    def amplitudes(self) -> np.ndarray:
        """√r_k (위상 θ(n−2k)/2 를 그대로 사용)"""
        k = np.arange(self.n + 1)
        magnitudes = np.sqrt(np.array([comb(self.n, int(j), exact=True) for j in k], dtype=float) / 2.0 ** self.n)
        return magnitudes * np.exp(0.5j * self.theta * (self.n - 2 * k))

    def component_states(self) -> List[np.ndarray]:
        """
        |φ_k⟩: k 개의 |1⟩ 과 n−k 개의 |0⟩ 을 갖는 곱 상태들의 균등 중첩

        Returns:
            2ⁿ 차원 곱 기저 (|0…0⟩ 먼저) 벡터 목록
        """
        Validator.check_memory_availability((self.n + 1) * 2 ** self.n * 16)
        weights = np.array([bin(index).count("1") for index in range(2 ** self.n)])
        states = []
        for k in range(self.n + 1):
            vec = (weights == k).astype(complex)
            states.append(vec / np.linalg.norm(vec))
        return states

    def reconstruct(self) -> np.ndarray:
        """Σ_k √r_k |φ_k⟩ (= |ψ⟩^{⊗n})"""
        return sum(a * phi for a, phi in zip(self.amplitudes, self.component_states()))


class Monotones:
    """τ, τ∞, 텐서 거듭제곱 각과 오라클"""

    @staticmethod
    def _self_conjugate(psi: PureState, conv: PhaseConvention) -> PureState:
        # 켤레는 기저 의존적이므로 물리 기저 상태는 먼저 변환
        if psi.basis is Basis.ANGULAR:
            return TimeReversal.to_self_conjugate(psi, conv)
        return psi

    @staticmethod
    def overlap(psi: PureState, conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ,
                tolerance: float = DEFAULT_TOLERANCE) -> float:
        """|⟨ψ*|ψ⟩| = |Σ ψ_n²|"""
        sc = Monotones._self_conjugate(psi, conv)
        sc.check_normalized(tolerance)
        return float(min(abs(np.sum(sc.amp * sc.amp)) / sc.norm ** 2, 1.0))

    @staticmethod
    def tau(psi: PureState, conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ,
            tolerance: float = DEFAULT_TOLERANCE) -> float:
        """
        TR 단조량 τ(ψ) = 1 − |Σ_n ψ_n²|

        Args:
            psi: 자기켤레 기저 상태 (물리 기저면 conv 로 변환)
            conv: 위상 규약
            tolerance: 정규화 허용치

        Returns:
            τ ∈ [0, 1]

        Raises:
            NormalizationError: 정규화되지 않은 입력
        """
        return 1.0 - Monotones.overlap(psi, conv, tolerance)

    @staticmethod
    def tau_infinity(psi: PureState, conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ,
                     tolerance: float = DEFAULT_TOLERANCE) -> float:
        """
        점근 단조량 τ∞(ψ) = −log₂|⟨ψ*|ψ⟩|

        Returns:
            비트 단위 값, θ = π/2 이면 math.inf
        """
        return MonotoneValue.from_cos(Monotones.overlap(psi, conv, tolerance)).tau_inf

    @staticmethod
    def value(psi: PureState, conv: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ,
              tolerance: float = DEFAULT_TOLERANCE) -> MonotoneValue:
        return MonotoneValue.from_cos(Monotones.overlap(psi, conv, tolerance))

    @staticmethod
    def tensor_power_angle(theta: float, n: int) -> float:
        """
        |ψ_θ⟩^{⊗n} 의 표준 각: cos θ_n = cosⁿθ

        Args:
            theta: θ ∈ [0, π/2]
            n: 사본 수 (≥ 1)

        Returns:
            θ_n
        """
        theta = Validator.check_angle("theta", theta)
        Validator.check_copy_count("n", n, 1, 10 ** 9)
        cos_n = min(max(math.cos(theta) ** n, 0.0), 1.0)
        return math.acos(cos_n)

    @staticmethod
    def binomial_expansion(theta: float, n: int) -> BinomialExpansion:
        """
        이항 전개 계수 r_k = 2^{−n} C(n,k) e^{iθ(n−2k)}

        Raises:
            SizeError: n ∉ [1, 20]
        """
        Validator.check_copy_count("n", n, 1, BINOMIAL_MAX_COPIES)
        theta = Validator.check_angle("theta", theta)
        k = np.arange(n + 1)
        binomials = np.array([comb(n, int(j), exact=True) for j in k], dtype=float)
        coeffs = binomials / 2.0 ** n * np.exp(1j * theta * (n - 2 * k))
        return BinomialExpansion(theta=theta, n=n, coeffs=coeffs)

    @staticmethod
    def tensor_power_state(theta: float, n: int) -> PureState:
        """
        표준 상태의 n 중 텐서곱 (2ⁿ 차원 자기켤레 곱 기저)
        """
        Validator.check_copy_count("n", n, 1, BRUTE_FORCE_MAX_COPIES)
        Validator.check_memory_availability(2 ** n * 16)
        single = StandardForm.standard_state(StandardResource(theta), 2)
        state = single
        for _ in range(n - 1):
            state = AngularCoupling.tensor(state, single)
        return state

    @staticmethod
    def brute_force_power_standardize(theta: float, n: int) -> float:
        """
        2ⁿ 차원 텐서곱을 직접 만들어 표준화한 θ_n (tensor_power_angle 의 독립 오라클)

        Args:
            theta: θ ∈ [0, π/2]
            n: 사본 수 (≤ 8)

        Returns:
            θ_n
        """
        theta = Validator.check_angle("theta", theta)
        state = Monotones.tensor_power_state(theta, n)
        return StandardForm.standardize(state).theta

    @staticmethod
    def coupled_power_state(theta: float, n: int) -> PureState:
        """
        |ψ_θ⟩^{⊗n} 를 총 각운동량 결합 기저로 만든다

        한 사본씩 표준 큐비트 결합 규칙으로 붙이고,
        새로 생긴 각운동량에는 새 다중도를 부여한다.
        """
        Validator.check_copy_count("n", n, 1, COUPLED_MAX_COPIES)
        theta = Validator.check_angle("theta", theta)
        c0 = np.exp(0.5j * theta) / np.sqrt(2.0)
        c1 = np.exp(-0.5j * theta) / np.sqrt(2.0)
        state = PureState.from_mapping(
            Basis.SELF_CONJUGATE,
            {AngularCoupling.QUBIT_ZERO: c0, AngularCoupling.QUBIT_ONE: c1}
        )
        for _ in range(n - 1):
            state = AngularCoupling.couple_qubit_state(state, c0, c1, MultiplicityCounter())
        return state

    @staticmethod
    def coupled_power_standardize(theta: float, n: int) -> float:
        """결합 기저 텐서 거듭제곱을 표준화한 θ_n (두 번째 오라클)"""
        return StandardForm.standardize(Monotones.coupled_power_state(theta, n)).theta

    @staticmethod
    def search_tau_inf_ensemble_violation(
        trials: int = 1000,
        seed=None,
        dims: Tuple[int, int] = (2, 4),
        outcomes: int = 2
    ) -> Tuple[float, Optional[dict]]:
        """
        Σ p_k τ∞(φ_k) > τ∞(ψ) 인 (측정, 상태) 쌍의 무작위 탐색

        Returns:
            (최대 초과량, 증인 정보 또는 None)
        """
        rng = np.random.default_rng(seed)
        best = -math.inf
        witness = None
        for trial in range(trials):
            dim = int(rng.integers(dims[0], dims[1] + 1))
            psi = Trio.random_state(dim, rng)
            before = Monotones.tau_infinity(psi)
            if math.isinf(before):
                continue
            inst = Trio.random_trio_instrument(dim, outcomes, rng)
            after = 0.0
            for p, phi in Trio.apply_instrument(inst, psi):
                if phi is None:
                    continue
                value = Monotones.tau_infinity(phi)
                after = math.inf if math.isinf(value) else after + p * value
            excess = after - before
            if excess > best:
                best = excess
                witness = {
                    "trial": trial,
                    "dim": dim,
                    "before": before,
                    "after": after,
                    "state": psi.amp.tolist(),
                    "kraus": [k.mat.real.tolist() for k in inst.kraus],
                }
        if witness is not None and best > 0:
            logger.info("τ∞ 앙상블 증가 사례 발견: 초과량 %.6g (시행 %d)", best, witness["trial"])
        return best, witness if best > 0 else None
