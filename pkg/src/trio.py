"""
시간 반전 불변 연산(TRIO) 판정과 생성
모든 행렬은 자기켤레 기저 {|e_n⟩} 에서 표현된다
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import ortho_group

from src.angular import Basis, PureState, SelfConjLabel
from src.config import DEFAULT_TOLERANCE, EXACT_TOLERANCE
from src.errors import BasisError, DimensionError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KrausOperator:
    """
    자기켤레 기저 위의 Kraus 연산자 K_{nn′}

    Attributes:
        mat: (출력 차원, 입력 차원) 복소 행렬
    """
    mat: np.ndarray

    def __post_init__(self):
        mat = np.atleast_2d(np.asarray(self.mat, dtype=complex))
        if mat.ndim != 2:
            raise DimensionError(f"Kraus 연산자는 2차원 행렬이어야 합니다: shape={mat.shape}")
        object.__setattr__(self, 'mat', mat)

    @property
    def dims(self) -> Tuple[int, int]:
        return self.mat.shape

    @property
    def spectral_norm(self) -> float:
        return float(np.linalg.norm(self.mat, ord=2))

    def apply(self, amp: np.ndarray) -> np.ndarray:
        return self.mat @ amp


@dataclass
class Instrument:
    """
    측정 (Kraus 연산자 목록, Σ K†K = I)

    Attributes:
        kraus: 공통 차원의 Kraus 연산자 목록
    """
    kraus: List[KrausOperator] = field(default_factory=list)

    def __post_init__(self):
        self.kraus = [k if isinstance(k, KrausOperator) else KrausOperator(k) for k in self.kraus]
        if not self.kraus:
            raise DimensionError("Kraus 연산자가 최소 하나 필요합니다")
        dims = {k.dims for k in self.kraus}
        if len(dims) != 1:
            raise DimensionError(f"Kraus 연산자의 차원이 서로 다릅니다: {sorted(dims)}")

    @property
    def dims(self) -> Tuple[int, int]:
        return self.kraus[0].dims

    def __len__(self) -> int:
        return len(self.kraus)

    @staticmethod
    def from_matrices(matrices: Sequence[np.ndarray]) -> "Instrument":
        return Instrument([KrausOperator(m) for m in matrices])


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """
    밀도 연산자 (에르미트, 대각합 1, 양의 준정부호)

    Attributes:
        mat: 자기켤레 기저 위의 정방 행렬
    """
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"밀도 연산자는 정방 행렬이어야 합니다: shape={mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > EXACT_TOLERANCE:
            raise ValidationError("밀도 연산자가 에르미트가 아닙니다")
        if abs(np.trace(mat) - 1.0) > EXACT_TOLERANCE:
            raise ValidationError("밀도 연산자의 대각합이 1 이 아닙니다", f"tr ρ = {np.trace(mat).real:.12g}")
        if np.min(np.linalg.eigvalsh(mat)) < -1e-10:
            raise ValidationError("밀도 연산자가 양의 준정부호가 아닙니다")
        object.__setattr__(self, 'mat', mat)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    @staticmethod
    def from_state(psi: PureState) -> "DensityOperator":
        """|ψ⟩⟨ψ| (자기켤레 기저)"""
        if psi.basis is not Basis.SELF_CONJUGATE:
            raise BasisError(Basis.SELF_CONJUGATE.value, psi.basis.value)
        return DensityOperator(np.outer(psi.amp, psi.amp.conj()))


@dataclass
class InstrumentReport:
    """
    측정 검증 결과

    Attributes:
        complete: Σ K†K = I 여부
        trio: 모든 원소가 (전역 위상을 빼고) 실수인지 여부
        defect: ‖Σ K†K − I‖ (스펙트럼 노름)
    """
    complete: bool
    trio: bool
    defect: float


class Trio:
    """TRIO 판정, 그룹 평균, 무작위 생성"""

    @staticmethod
    def remove_global_phase(mat: np.ndarray) -> np.ndarray:
        """최대 크기 원소를 양의 실수로 만드는 전역 위상 제거"""
        mat = np.asarray(mat, dtype=complex)
        flat = mat.reshape(-1)
        if flat.size == 0:
            return mat
        pivot = flat[int(np.argmax(np.abs(flat)))]
        if pivot == 0:
            return mat
        return mat * (abs(pivot) / pivot)

    @staticmethod
    def is_trio(k: KrausOperator, tol: float = DEFAULT_TOLERANCE) -> bool:
        """
        효율적 사상 K•K† 의 TRIO 여부

        전역 위상 e^{iφ} 를 곱해 K 가 원소별로 실수가 되면 참.
        위상은 최대 크기 원소에서 정한다.

        Args:
            k: 자기켤레 기저의 Kraus 연산자
            tol: 허수부 허용치

        Returns:
            TRIO 이면 True
        """
        k = k if isinstance(k, KrausOperator) else KrausOperator(k)
        adjusted = Trio.remove_global_phase(k.mat)
        return float(np.max(np.abs(adjusted.imag), initial=0.0)) <= tol

    @staticmethod
    def random_state(dim: int, seed=None) -> PureState:
        """
        표준 자기켤레 라벨 위의 무작위 순수 상태

        복소 정규분포 진폭을 정규화한다 (시드가 같으면 같은 상태).
        """
        if dim < 1:
            raise DimensionError(f"차원은 1 이상이어야 합니다: {dim}")
        rng = np.random.default_rng(seed)
        amp = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return PureState.self_conjugate(amp / np.linalg.norm(amp))

    @staticmethod
    def covariance_defect(k: KrausOperator, trials: int = 100, seed=None) -> float:
        """
        K θ̂|ψ⟩⟨ψ|θ̂†K† 와 θ̂K|ψ⟩⟨ψ|K†θ̂† 의 최대 차이

        자기켤레 기저에서 θ̂ 는 복소켤레이므로
        (Kψ*)(Kψ*)† 와 ((Kψ)(Kψ)†)* 를 비교한다.
        """
        k = k if isinstance(k, KrausOperator) else KrausOperator(k)
        rows, cols = k.dims
        if rows != cols:
            raise DimensionError(f"공변성 검사는 정방 행렬만 지원합니다: {k.dims}")

        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            psi = rng.normal(size=cols) + 1j * rng.normal(size=cols)
            psi /= np.linalg.norm(psi)
            left = k.mat @ psi.conj()
            right = (k.mat @ psi).conj()
            defect = np.max(np.abs(np.outer(left, left.conj()) - np.outer(right, right.conj())))
            worst = max(worst, float(defect))
        return worst

    @staticmethod
    def covariance_check(k: KrausOperator, trials: int = 100, seed=None,
                         tol: float = DEFAULT_TOLERANCE) -> bool:
        """
        무작위 순수 상태에 대한 TR 공변성 검사

        Args:
            k: 정방 Kraus 연산자
            trials: 표본 상태 수
            seed: 난수 시드
            tol: 허용치

        Returns:
            모든 표본에서 공변이면 True (is_trio 와 일치해야 함)
        """
        return Trio.covariance_defect(k, trials, seed) <= tol

    @staticmethod
    def group_average(rho: DensityOperator) -> DensityOperator:
        """
        TR 그룹 평균 ρ ↦ (ρ + θ̂ρθ̂†)/2

        자기켤레 기저에서는 (ρ + ρ*)/2, 즉 실수부.
        """
        rho = rho if isinstance(rho, DensityOperator) else DensityOperator(rho)
        return DensityOperator(np.real(rho.mat).astype(complex))

    @staticmethod
    def group_average_state(psi: PureState) -> DensityOperator:
        """순수 상태의 그룹 평균 (|ψ⟩⟨ψ| + |ψ*⟩⟨ψ*|)/2"""
        return Trio.group_average(DensityOperator.from_state(psi))

    @staticmethod
    def validate_instrument(inst: Instrument, tol: float = DEFAULT_TOLERANCE) -> InstrumentReport:
        """
        측정의 완전성과 TRIO 여부 검증

        Args:
            inst: 측정
            tol: 허용치

        Returns:
            InstrumentReport

        Raises:
            DimensionError: 차원 불일치
        """
        if not isinstance(inst, Instrument):
            inst = Instrument.from_matrices(inst)
        _, cols = inst.dims
        total = sum(k.mat.conj().T @ k.mat for k in inst.kraus)
        defect = float(np.linalg.norm(total - np.eye(cols), ord=2))
        trio = all(Trio.is_trio(k, tol) for k in inst.kraus)
        return InstrumentReport(complete=defect <= tol, trio=trio, defect=defect)

    @staticmethod
    def is_trio_instrument(inst: Instrument, tol: float = DEFAULT_TOLERANCE) -> bool:
        report = Trio.validate_instrument(inst, tol)
        return report.complete and report.trio

    @staticmethod
    def random_trio_orthogonal(dim: int, seed=None) -> KrausOperator:
        """
        Haar 분포 무작위 실직교 행렬 (가역 TRIO)

        Args:
            dim: 차원 (≥ 1)
            seed: 난수 시드

        Returns:
            OᵀO = I 인 KrausOperator
        """
        if dim < 1:
            raise DimensionError(f"차원은 1 이상이어야 합니다: {dim}")
        rng = np.random.default_rng(seed)
        if dim == 1:
            return KrausOperator(np.array([[rng.choice([-1.0, 1.0])]]))
        return KrausOperator(ortho_group.rvs(dim, random_state=rng))

    @staticmethod
    def random_trio_instrument(dim: int, outcomes: int = 2, seed=None) -> Instrument:
        """
        무작위 실수 Kraus 측정

        실수 가우스 행렬의 QR 로 얻은 등거리 사상 V (outcomes·dim × dim) 를
        dim × dim 블록으로 나눈다. VᵀV = I 이므로 완전하다.
        """
        if dim < 1 or outcomes < 1:
            raise DimensionError(f"차원과 결과 수는 1 이상이어야 합니다: dim={dim}, outcomes={outcomes}")
        rng = np.random.default_rng(seed)
        gaussian = rng.normal(size=(outcomes * dim, dim))
        isometry, upper = np.linalg.qr(gaussian)
        isometry = isometry * np.sign(np.diag(upper))
        blocks = [isometry[i * dim:(i + 1) * dim, :] for i in range(outcomes)]
        return Instrument.from_matrices(blocks)

    @staticmethod
    def apply_instrument(inst: Instrument, psi: PureState,
                         tol: float = EXACT_TOLERANCE) -> List[Tuple[float, Optional[PureState]]]:
        """
        측정 후 앙상블 {p_k, φ_k = K_kψ/√p_k}

        확률이 tol 이하인 결과의 상태는 None.
        """
        if psi.basis is not Basis.SELF_CONJUGATE:
            raise BasisError(Basis.SELF_CONJUGATE.value, psi.basis.value)
        rows, cols = inst.dims
        if cols != psi.dim:
            raise DimensionError(f"측정 입력 차원 {cols} 와 상태 차원 {psi.dim} 이 다릅니다")

        out_labels = psi.labels if rows == psi.dim else tuple(SelfConjLabel.standard_labels(rows))
        ensemble: List[Tuple[float, Optional[PureState]]] = []
        for k in inst.kraus:
            branch = k.apply(psi.amp)
            p = float(np.real(np.vdot(branch, branch)))
            if p <= tol:
                ensemble.append((p, None))
                continue
            ensemble.append((p, PureState(Basis.SELF_CONJUGATE, out_labels, branch / np.sqrt(p))))
        return ensemble
