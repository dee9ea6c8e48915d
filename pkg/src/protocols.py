"""
TRIO 변환 프로토콜 합성

표준 자원 사이의 결정적 변환, 앙상블 변환, 최대 확률 변환과
점근 사본 비율을 계산한다. 모든 측정은 표준 자기켤레 기저의
2차원 (|0⟩, |1⟩) 부분공간에서 정의된다.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.angular import Basis, PureState
from src.config import FEASIBILITY_TOLERANCE
from src.errors import DimensionError, InvalidTarget, MonotoneViolation, ValidationError
from src.monotones import Monotones
from src.standardform import StandardForm, StandardResource
from src.trio import Instrument, Trio
from src.validator import Validator

logger = logging.getLogger(__name__)

# 생성한 측정이 만족해야 하는 완전성/실수성 허용치
INSTRUMENT_TOLERANCE = 1e-10
# 이 확률 이하의 분기는 상태를 만들지 않는다
_NEGLIGIBLE = 1e-15
# max_copies 의 n 상한
MAX_COPY_COUNT = 10 ** 12


@dataclass
class TargetEnsemble:
    """
    목표 앙상블 {p_k, γ_k}

    Attributes:
        items: (확률, 표준 자원) 목록
    """
    items: List[Tuple[float, StandardResource]] = field(default_factory=list)

    def __post_init__(self):
        items = []
        for p, res in self.items:
            if not isinstance(res, StandardResource):
                res = StandardResource(res)
            items.append((float(p), res))
        self.items = items
        Validator.check_probabilities([p for p, _ in self.items], FEASIBILITY_TOLERANCE)

    @staticmethod
    def from_pairs(pairs: Sequence[Tuple[float, float]]) -> "TargetEnsemble":
        """(p, γ) 실수 쌍 목록에서 생성"""
        return TargetEnsemble([(p, StandardResource(gamma)) for p, gamma in pairs])

    @property
    def probabilities(self) -> List[float]:
        return [p for p, _ in self.items]

    @property
    def angles(self) -> List[float]:
        return [res.theta for _, res in self.items]

    @property
    def average_cos(self) -> float:
        """Σ p_k cos γ_k"""
        return math.fsum(p * math.cos(res.theta) for p, res in self.items)

    @property
    def average_tau(self) -> float:
        return math.fsum(p * res.tau for p, res in self.items)


@dataclass
class ConversionStage:
    """
    변환의 한 단계

    Attributes:
        instrument: TRIO 측정
        description: 단계 설명
        corrections: 결과별 측정 후 실직교 보정 (None 이면 보정 없음)
    """
    instrument: Instrument
    description: str
    corrections: List[Optional[np.ndarray]] = field(default_factory=list)

    def __post_init__(self):
        if not self.corrections:
            self.corrections = [None] * len(self.instrument)
        if len(self.corrections) != len(self.instrument):
            raise DimensionError(
                f"보정 개수 {len(self.corrections)} 와 결과 개수 {len(self.instrument)} 가 다릅니다"
            )


@dataclass(frozen=True)
class PlanOutcome:
    """
    예상 결과 (결과 경로 → 표준 자원, 확률)

    Attributes:
        path: 단계별 결과 번호
        probability: 경로 확률
        resource: 경로 끝의 표준 자원
    """
    path: Tuple[int, ...]
    probability: float
    resource: StandardResource

    @property
    def key(self) -> str:
        return "-".join(str(k) for k in self.path)


@dataclass(frozen=True, eq=False)
class BranchState:
    """실행 결과 분기 (상태는 확률이 0 이면 None)"""
    path: Tuple[int, ...]
    probability: float
    state: Optional[PureState]

    @property
    def key(self) -> str:
        return "-".join(str(k) for k in self.path)


@dataclass
class ConversionPlan:
    """
    변환 계획

    Attributes:
        theta: 입력 표준 자원 각
        stages: 순서대로 적용할 단계
        outcomes: 예상 결과
        parameters: A, γ̄, a_k, b_k, p 등 보고용 값
    """
    theta: float
    stages: List[ConversionStage]
    outcomes: List[PlanOutcome]
    parameters: Dict[str, object] = field(default_factory=dict)

    @property
    def expected_probability(self) -> float:
        return math.fsum(o.probability for o in self.outcomes)

    def _input_state(self, psi: Optional[PureState]) -> PureState:
        if psi is None:
            return StandardForm.standard_state(StandardResource(self.theta), 2)
        if psi.basis is not Basis.SELF_CONJUGATE or psi.dim != 2:
            raise DimensionError("변환 계획은 표준 형식의 2차원 자기켤레 상태에만 적용됩니다")
        return psi

    def execute(self, psi: Optional[PureState] = None) -> List[BranchState]:
        """
        모든 단계를 정확한 분기 확률로 적용

        Args:
            psi: 입력 상태 (생략 시 standard_state(θ))

        Returns:
            경로별 (확률, 결과 상태) 목록
        """
        psi = self._input_state(psi)
        labels = psi.labels
        branches: List[Tuple[Tuple[int, ...], float, Optional[np.ndarray]]] = [((), 1.0, psi.amp)]

        for stage in self.stages:
            next_branches = []
            for path, prob, amp in branches:
                for k, kraus in enumerate(stage.instrument.kraus):
                    if amp is None:
                        next_branches.append((path + (k,), 0.0, None))
                        continue
                    out = kraus.apply(amp)
                    q = float(np.real(np.vdot(out, out)))
                    if q <= _NEGLIGIBLE:
                        next_branches.append((path + (k,), prob * q, None))
                        continue
                    out = out / math.sqrt(q)
                    correction = stage.corrections[k]
                    if correction is not None:
                        out = correction @ out
                    next_branches.append((path + (k,), prob * q, out))
            branches = next_branches

        return [
            BranchState(path, prob, None if amp is None else PureState(Basis.SELF_CONJUGATE, labels, amp))
            for path, prob, amp in branches
        ]

    def success_probability(self, gamma: float, psi: Optional[PureState] = None,
                            tolerance: float = 1e-9) -> float:
        """τ(φ) ≥ 1 − cos γ 인 분기들의 확률 합"""
        target_tau = 1.0 - math.cos(gamma)
        return math.fsum(
            b.probability for b in self.execute(psi)
            if b.state is not None and Monotones.tau(b.state) >= target_tau - tolerance
        )

    def average_tau(self, psi: Optional[PureState] = None) -> float:
        """실행 후 Σ p τ(φ)"""
        return math.fsum(
            b.probability * Monotones.tau(b.state) for b in self.execute(psi) if b.state is not None
        )

    def sample(self, psi: Optional[PureState] = None, seed=None, trials: int = 100) -> Dict[str, int]:
        """
        시드 기반 결과 표본 추출

        Returns:
            경로 키 → 횟수 (키 정렬)
        """
        Validator.check_copy_count("trials", trials, 1, 10 ** 8)
        branches = self.execute(psi)
        probs = np.array([b.probability for b in branches])
        probs = probs / probs.sum()
        rng = np.random.default_rng(seed)
        draws = rng.choice(len(branches), size=trials, p=probs)
        counts = np.bincount(draws, minlength=len(branches))
        return {branches[i].key: int(counts[i]) for i in sorted(range(len(branches)), key=lambda i: branches[i].key)}


class Protocols:
    """표준 자원 변환과 점근 비율"""

    @staticmethod
    def _checked(inst: Instrument, description: str) -> Instrument:
        report = Trio.validate_instrument(inst, INSTRUMENT_TOLERANCE)
        if not (report.complete and report.trio):
            logger.error("%s: 측정 검증 실패 (결함 %.3g)", description, report.defect)
            raise ValidationError(f"{description}: 생성된 측정이 완전한 TRIO 가 아닙니다", f"결함 {report.defect:.3g}")
        return inst

    @staticmethod
    def _branch_correction(kraus: np.ndarray, source: PureState) -> np.ndarray:
        """
        분기 상태를 standard_state 형식으로 옮기는 실직교 보정

        Kᵀ 는 (1, e^{iγ})/√2 를 주므로 |0⟩, |1⟩ 을 바꿔
        e^{iγ/2}(e^{iγ/2}, e^{−iγ/2})/√2 로 맞춘다.
        """
        out = kraus @ source.amp
        out = out / np.linalg.norm(out)
        result = StandardForm.standardize(source.with_amplitudes(out))
        return result.transform.T[[1, 0], :]

    @staticmethod
    def deterministic_parameter(theta: float, gamma: float) -> float:
        """
        A = 1/2 + (1/2)√((cos²γ − cos²θ)/(1 − cos²θ))

        θ = 0 (분모 0) 이면 A = 1/2.
        """
        cos_t2 = math.cos(theta) ** 2
        cos_g2 = math.cos(gamma) ** 2
        denominator = 1.0 - cos_t2
        if denominator <= FEASIBILITY_TOLERANCE:
            ratio = 0.0
        else:
            ratio = min(max((cos_g2 - cos_t2) / denominator, 0.0), 1.0)
        return 0.5 + 0.5 * math.sqrt(ratio)

    @staticmethod
    def deterministic_kraus(a_param: float) -> Tuple[np.ndarray, np.ndarray]:
        """A 로 정해지는 두 Kraus 연산자 (K₁, K₂)"""
        s = math.sqrt(a_param / 2.0)
        t = math.sqrt((1.0 - a_param) / 2.0)
        k1 = np.array([[s, t], [s, -t]])
        k2 = np.array([[-t, s], [t, s]])
        return k1, k2

    @staticmethod
    def deterministic_convert(theta: float, gamma: float) -> ConversionPlan:
        """
        결정적 변환 ψ_θ → φ_γ

        Args:
            theta: 입력 각
            gamma: 목표 각

        Returns:
            두 결과 측정과 결과별 보정을 담은 계획 (각 결과 확률 1/2)

        Raises:
            MonotoneViolation: cos γ < cos θ − 1e-12 (τ 증가)
        """
        theta = Validator.check_angle("theta", theta)
        gamma = Validator.check_angle("gamma", gamma)
        if math.cos(gamma) < math.cos(theta) - FEASIBILITY_TOLERANCE:
            logger.warning("결정적 변환 불가: θ=%.6g, γ=%.6g", theta, gamma)
            raise MonotoneViolation(
                1.0 - math.cos(theta), 1.0 - math.cos(gamma),
                "결정적 TRIO 변환은 τ 를 늘릴 수 없습니다 (γ > θ)"
            )

        a_param = Protocols.deterministic_parameter(theta, gamma)
        k1, k2 = Protocols.deterministic_kraus(a_param)
        description = f"결정적 변환 θ={theta:.6g} → γ={gamma:.6g}"
        inst = Protocols._checked(Instrument.from_matrices([k1, k2]), description)

        source = StandardForm.standard_state(StandardResource(theta), 2)
        corrections = [Protocols._branch_correction(k, source) for k in (k1, k2)]
        target = StandardResource(gamma)
        return ConversionPlan(
            theta=theta,
            stages=[ConversionStage(inst, description, corrections)],
            outcomes=[PlanOutcome((0,), 0.5, target), PlanOutcome((1,), 0.5, target)],
            parameters={"A": a_param, "gamma": gamma}
        )

    @staticmethod
    def ensemble_coefficients(gamma_bar: float, target: TargetEnsemble) -> Tuple[List[float], List[float]]:
        """
        a_k, b_k = (√p_k/2)[cos(γ_k/2)/cos(γ̄/2) ± sin(γ_k/2)/sin(γ̄/2)]

        γ̄ = 0 이면 모든 γ_k = 0 이므로 K_k = √p_k I (a_k = √p_k, b_k = 0).
        """
        half_cos = math.cos(gamma_bar / 2.0)
        half_sin = math.sin(gamma_bar / 2.0)
        a_values, b_values = [], []
        for p, res in target.items:
            root = math.sqrt(p)
            if half_sin <= FEASIBILITY_TOLERANCE:
                a_values.append(root)
                b_values.append(0.0)
                continue
            c = math.cos(res.theta / 2.0) / half_cos
            s = math.sin(res.theta / 2.0) / half_sin
            a_values.append(0.5 * root * (c + s))
            b_values.append(0.5 * root * (c - s))
        return a_values, b_values

    @staticmethod
    def ensemble_convert(theta: float, target: TargetEnsemble) -> ConversionPlan:
        """
        앙상블 변환 ψ_θ → {p_k, φ_{γ_k}}

        1단계에서 평균 각 γ̄ (cos γ̄ = Σ p_k cos γ_k) 로 결정적 변환하고,
        2단계에서 K_k = [[a_k, b_k], [b_k, a_k]] 로 K_k|φ̄⟩ = √p_k|φ_k⟩ 를 만든다.

        Raises:
            MonotoneViolation: Σ p_k τ_k > τ(ψ)
        """
        theta = Validator.check_angle("theta", theta)
        if not isinstance(target, TargetEnsemble):
            target = TargetEnsemble.from_pairs(target)

        average_cos = target.average_cos
        if average_cos < math.cos(theta) - FEASIBILITY_TOLERANCE:
            logger.warning("앙상블 변환 불가: θ=%.6g, Σp τ=%.6g", theta, target.average_tau)
            raise MonotoneViolation(
                1.0 - math.cos(theta), target.average_tau,
                "TRIO 는 τ 의 평균을 늘릴 수 없습니다"
            )
        gamma_bar = math.acos(min(max(average_cos, 0.0), 1.0))

        first = Protocols.deterministic_convert(theta, gamma_bar)
        a_values, b_values = Protocols.ensemble_coefficients(gamma_bar, target)
        if math.sin(gamma_bar / 2.0) <= FEASIBILITY_TOLERANCE:
            logger.debug("γ̄ = 0: 2단계 Kraus 를 √p_k I 로 대체")
        matrices = [np.array([[a, b], [b, a]]) for a, b in zip(a_values, b_values)]
        description = f"앙상블 분기 γ̄={gamma_bar:.6g}"
        second = ConversionStage(Protocols._checked(Instrument.from_matrices(matrices), description), description)

        outcomes = [
            PlanOutcome((j, k), 0.5 * p, res)
            for j in range(len(first.stages[0].instrument))
            for k, (p, res) in enumerate(target.items)
        ]
        return ConversionPlan(
            theta=theta,
            stages=[first.stages[0], second],
            outcomes=outcomes,
            parameters={
                "A": first.parameters["A"],
                "gamma_bar": gamma_bar,
                "a": a_values,
                "b": b_values,
            }
        )

    @staticmethod
    def max_probability(theta: float, gamma: float) -> Tuple[float, ConversionPlan]:
        """
        확률적 변환의 최대 성공 확률 p = min{(1 − cos θ)/(1 − cos γ), 1}

        Returns:
            (p, 계획). p < 1 이면 실패 분기는 자유 상태 (γ = 0) 로 간다.
        """
        theta = Validator.check_angle("theta", theta)
        gamma = Validator.check_angle("gamma", gamma)
        cos_t = math.cos(theta)
        cos_g = math.cos(gamma)

        if 1.0 - cos_g <= FEASIBILITY_TOLERANCE:
            return 1.0, Protocols.deterministic_convert(theta, 0.0)
        if cos_g >= cos_t - FEASIBILITY_TOLERANCE:
            return 1.0, Protocols.deterministic_convert(theta, gamma)

        p = min(max((1.0 - cos_t) / (1.0 - cos_g), 0.0), 1.0)
        target = TargetEnsemble([(p, StandardResource(gamma)), (1.0 - p, StandardResource(0.0))])
        plan = Protocols.ensemble_convert(theta, target)
        plan.parameters["p"] = p
        return p, plan

    @staticmethod
    def asymptotic_rate(theta_psi: float, theta_phi: float) -> float:
        """
        점근 비율 τ∞(ψ)/τ∞(φ) = log cos θ_ψ / log cos θ_φ

        Returns:
            비율 (θ_ψ = π/2 이고 θ_φ < π/2 이면 math.inf)

        Raises:
            InvalidTarget: θ_φ = 0 (자유 목표)
        """
        theta_psi = Validator.check_angle("theta_psi", theta_psi)
        theta_phi = Validator.check_angle("theta_phi", theta_phi)
        cos_psi = math.cos(theta_psi)
        cos_phi = math.cos(theta_phi)

        if 1.0 - cos_phi <= FEASIBILITY_TOLERANCE:
            raise InvalidTarget("목표가 자유 상태입니다 (θ_φ = 0): 비율이 정의되지 않습니다")
        if 1.0 - cos_psi <= FEASIBILITY_TOLERANCE:
            return 0.0
        psi_maximal = cos_psi <= FEASIBILITY_TOLERANCE
        phi_maximal = cos_phi <= FEASIBILITY_TOLERANCE
        if psi_maximal and phi_maximal:
            return 1.0
        if phi_maximal:
            return 0.0
        if psi_maximal:
            return math.inf
        return math.log2(cos_psi) / math.log2(cos_phi)

    @staticmethod
    def max_copies(n: int, theta_psi: float, theta_phi: float) -> int:
        """
        n 사본에서 얻을 수 있는 최대 목표 사본 수

        m·τ∞(φ) ≤ n·τ∞(ψ) + 1e-12 인 최대 정수 m.

        Raises:
            InvalidTarget: θ_φ = 0, 또는 θ_ψ = π/2 (무한히 많은 사본)
        """
        Validator.check_copy_count("n", n, 1, MAX_COPY_COUNT)
        theta_psi = Validator.check_angle("theta_psi", theta_psi)
        theta_phi = Validator.check_angle("theta_phi", theta_phi)
        cos_psi = math.cos(theta_psi)
        cos_phi = math.cos(theta_phi)

        if 1.0 - cos_phi <= FEASIBILITY_TOLERANCE:
            raise InvalidTarget("목표가 자유 상태입니다 (θ_φ = 0): 사본 수가 유한하지 않습니다")
        if 1.0 - cos_psi <= FEASIBILITY_TOLERANCE:
            return 0
        if cos_psi <= FEASIBILITY_TOLERANCE:
            raise InvalidTarget("입력이 최대 자원입니다 (θ_ψ = π/2): 사본 수가 유한하지 않습니다")
        if cos_phi <= FEASIBILITY_TOLERANCE:
            return 0
        tau_psi = -math.log2(cos_psi)
        tau_phi = -math.log2(cos_phi)
        return int(math.floor((n * tau_psi + FEASIBILITY_TOLERANCE) / tau_phi))

    @staticmethod
    def copies_feasible(n: int, m: int, theta_psi: float, theta_phi: float,
                        tolerance: float = FEASIBILITY_TOLERANCE) -> bool:
        """
        ψ^{⊗n} → φ^{⊗m} 결정적 변환 가능 여부

        텐서 거듭제곱 각으로 cosⁿθ_ψ ≤ cos^mθ_φ 를 비교한다.
        """
        if m == 0:
            return True
        cos_n = math.cos(Monotones.tensor_power_angle(theta_psi, n))
        cos_m = math.cos(Monotones.tensor_power_angle(theta_phi, m))
        return cos_n <= cos_m + tolerance
