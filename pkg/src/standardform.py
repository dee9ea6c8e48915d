"""
표준 자원 형식으로의 환원

임의의 순수 상태 ψ 를 실직교 K 와 전역 위상 γ 로
ψ = e^{iγ} K (1, e^{iθ}, 0, …, 0)ᵀ/√2, 0 ≤ θ ≤ π/2 로 쓴다.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.angular import Basis, PureState, SelfConjLabel
from src.config import DEFAULT_TOLERANCE
from src.errors import BasisError, DimensionError, ValidationError
from src.validator import Validator

logger = logging.getLogger(__name__)

# 퇴화 판정 기준 (노름 단위)
_DEGENERATE = 1e-13


@dataclass(frozen=True)
class StandardResource:
    """
    표준 자원 (e^{iθ/2}|0⟩ + e^{−iθ/2}|1⟩)/√2

    Attributes:
        theta: 0 ≤ θ ≤ π/2 (라디안)
    """
    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        if not -1e-12 <= theta <= np.pi / 2 + 1e-12:
            raise ValidationError(f"θ 는 [0, π/2] 범위여야 합니다: {theta!r}")
        object.__setattr__(self, 'theta', min(max(theta, 0.0), np.pi / 2))

    @property
    def tau(self) -> float:
        return 1.0 - np.cos(self.theta)


@dataclass(frozen=True, eq=False)
class StandardizationResult:
    """
    standardize 결과

    Attributes:
        resource: 표준 자원 θ
        transform: 실직교 행렬 K (입력 라벨 순서)
        global_phase: 전역 위상 γ
        rotation_angle: 2×2 블록 R_α 의 각 α
        reflected: R_α 가 반사(det = −1)를 포함하는지 여부
    """
    resource: StandardResource
    transform: np.ndarray
    global_phase: float
    rotation_angle: float = 0.0
    reflected: bool = False

    @property
    def theta(self) -> float:
        return self.resource.theta

    def standard_amplitudes(self, psi: PureState) -> np.ndarray:
        """e^{−iγ} Kᵀ ψ (표준 형식이 되어야 함)"""
        return np.exp(-1j * self.global_phase) * (self.transform.T @ psi.amp)


class StandardForm:
    """표준 형식 환원과 표준 상태 생성"""

    @staticmethod
    def standard_state(res: StandardResource, dim: int = 2) -> PureState:
        """
        표준 상태 (e^{iθ/2}, e^{−iθ/2}, 0, …, 0)ᵀ/√2

        Args:
            res: 표준 자원
            dim: 차원 (≥ 2)

        Returns:
            표준 자기켤레 라벨 위의 상태

        Raises:
            DimensionError: dim < 2
        """
        if dim < 2:
            raise DimensionError(f"표준 상태의 차원은 2 이상이어야 합니다: {dim}")
        theta = res.theta if isinstance(res, StandardResource) else StandardResource(res).theta
        amp = np.zeros(dim, dtype=complex)
        amp[0] = np.exp(0.5j * theta) / np.sqrt(2.0)
        amp[1] = np.exp(-0.5j * theta) / np.sqrt(2.0)
        return PureState(Basis.SELF_CONJUGATE, tuple(SelfConjLabel.standard_labels(dim)), amp)

    @staticmethod
    def _complete_orthonormal(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """x, y 를 처음 두 열로 갖는 직교 행렬 K′"""
        dim = x.size
        stacked = np.column_stack([x, y, np.eye(dim)])
        q, _ = np.linalg.qr(stacked)
        # x, y 가 직교 정규이므로 처음 두 열은 ±x, ±y
        q[:, 0] = x
        q[:, 1] = y
        return q

    @staticmethod
    def _orthogonal_direction(x: np.ndarray) -> np.ndarray:
        """x 에 가장 덜 정렬된 표준 방향을 Gram-Schmidt 직교화"""
        e = np.zeros_like(x)
        e[int(np.argmin(np.abs(x)))] = 1.0
        y = e - np.dot(e, x) * x
        return y / np.linalg.norm(y)

    @staticmethod
    def _reduce_pair(w: np.ndarray):
        """
        2성분 상태 w = (a+ib, ic) 를 e^{iγ} R (1, e^{iθ})ᵀ/√2 로 분해

        Returns:
            (R, θ, γ)
        """
        z = complex(w[0] * w[0] + w[1] * w[1])
        phi = 0.5 * np.angle(z) if abs(z) > _DEGENERATE else 0.0
        rotated = np.exp(-1j * phi) * w
        u = rotated.real
        v = rotated.imag
        # |u|² = (1+|z|)/2 ≥ 1/2
        x_hat = u / np.linalg.norm(u)
        v_norm = np.linalg.norm(v)
        if v_norm > _DEGENERATE:
            y_hat = v / v_norm
        else:
            y_hat = np.array([-x_hat[1], x_hat[0]])
        # u ⊥ v 이므로 y_hat 은 x_hat 과 직교
        y_hat = y_hat - np.dot(y_hat, x_hat) * x_hat
        y_hat /= np.linalg.norm(y_hat)

        rotation = np.column_stack([(x_hat - y_hat), (x_hat + y_hat)]) / np.sqrt(2.0)
        # u = cos(θ/2) x̂, v = sin(θ/2) ŷ; arccos|z| 는 θ → 0 에서 정밀도를 잃는다
        theta = float(2.0 * np.arctan2(v_norm, np.linalg.norm(u)))
        theta = min(max(theta, 0.0), np.pi / 2)
        gamma = float(phi - 0.5 * theta)
        return rotation, theta, gamma

    @staticmethod
    def standardize(psi: PureState, tolerance: float = DEFAULT_TOLERANCE) -> StandardizationResult:
        """
        모든 순수 상태는 가역 TRIO 로 표준 형식이 된다

        ψ = ψ^R + iψ^I, a = ‖ψ^R‖, x = ψ^R/a, ψ^I = b x + c y 로 분해하고
        x, y 를 직교 행렬 K′ 의 처음 두 열로 둔 뒤,
        (a+ib, ic) 를 2×2 실회전 R_α 로 e^{iγ}(1, e^{iθ})/√2 에 맞춘다.
        항상 cos θ = |Σ ψ_n²|.

        Args:
            psi: 자기켤레 기저의 정규화된 상태
            tolerance: 정규화 허용치

        Returns:
            StandardizationResult (K = K′ R_α)

        Raises:
            NormalizationError: 정규화되지 않은 입력
        """
        if psi.basis is not Basis.SELF_CONJUGATE:
            raise BasisError(Basis.SELF_CONJUGATE.value, psi.basis.value)
        psi.check_normalized(tolerance)
        Validator.check_memory_availability(psi.dim * psi.dim * 8 * 3)

        amp = psi.amp / psi.norm
        dim = amp.size
        if dim == 1:
            return StandardizationResult(StandardResource(0.0), np.eye(1), float(np.angle(amp[0])))

        # 순허수 진폭: 전역 위상 i 를 곱하면 실수가 된다
        offset = 0.0
        if np.linalg.norm(amp.real) <= _DEGENERATE:
            logger.debug("순허수 상태: 전역 위상 i 로 실수화")
            amp = 1j * amp
            offset = np.pi / 2

        real_part = amp.real
        imag_part = amp.imag
        a = float(np.linalg.norm(real_part))
        x = real_part / a
        b = float(np.dot(imag_part, x))
        residual = imag_part - b * x
        c = float(np.linalg.norm(residual))
        if c <= _DEGENERATE:
            logger.debug("ψ^I ∥ ψ^R: 실수 상태 (θ = 0), y 를 표준 방향에서 선택")
            y = StandardForm._orthogonal_direction(x)
            c = 0.0
        else:
            y = residual / c

        k_prime = StandardForm._complete_orthonormal(x, y)
        rotation, theta, gamma = StandardForm._reduce_pair(np.array([a + 1j * b, 1j * c]))

        block = np.eye(dim)
        block[:2, :2] = rotation
        transform = k_prime @ block

        reflected = bool(np.linalg.det(rotation) < 0)
        alpha = float(np.arctan2(rotation[1, 0], rotation[0, 0]))
        gamma = float(np.angle(np.exp(1j * (gamma - offset))))
        return StandardizationResult(
            resource=StandardResource(theta),
            transform=transform,
            global_phase=gamma,
            rotation_angle=alpha,
            reflected=reflected
        )

    @staticmethod
    def cos_theta(psi: PureState) -> float:
        """|⟨ψ*|ψ⟩| = |Σ ψ_n²| (직교 변환에 불변)"""
        if psi.basis is not Basis.SELF_CONJUGATE:
            raise BasisError(Basis.SELF_CONJUGATE.value, psi.basis.value)
        return float(min(abs(np.sum(psi.amp * psi.amp)), 1.0))
