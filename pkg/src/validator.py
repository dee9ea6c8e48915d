"""
입력 및 자원 검증 모듈
"""

import logging
import math
from pathlib import Path
from typing import Optional, Sequence

import psutil

from src.config import DEFAULT_TOLERANCE, FEASIBILITY_TOLERANCE
from src.errors import (
    DimensionError,
    InsufficientMemoryError,
    SizeError,
    ValidationError,
)

logger = logging.getLogger(__name__)


class Validator:
    """검증 클래스"""

    # 가용 메모리 대비 경고 임계 비율
    MEMORY_THRESHOLD = 0.7

    @staticmethod
    def check_memory_availability(required_bytes: int) -> None:
        """
        밀집 행렬 생성 전 메모리 가용성 체크

        Args:
            required_bytes: 예상 필요 메모리 (바이트)

        Raises:
            InsufficientMemoryError: 필요 메모리 > 가용 메모리 × 0.7
        """
        available = psutil.virtual_memory().available
        if required_bytes > available * Validator.MEMORY_THRESHOLD:
            logger.warning("메모리 부족 예상: 필요 %d 바이트, 가용 %d 바이트", required_bytes, available)
            raise InsufficientMemoryError(required_bytes, available)

    @staticmethod
    def check_copy_count(name: str, n: int, low: int, high: int) -> None:
        """
        사본 수 범위 검증

        Raises:
            SizeError: n 이 [low, high] 밖
        """
        if not isinstance(n, int) or isinstance(n, bool) or not low <= n <= high:
            raise SizeError(name, n, low, high)

    @staticmethod
    def check_angle(name: str, theta: float, tolerance: float = FEASIBILITY_TOLERANCE) -> float:
        """
        표준 각 θ ∈ [0, π/2] 검증 후 범위로 고정

        Returns:
            [0, π/2] 로 고정된 각

        Raises:
            ValidationError: 범위 밖 또는 유한하지 않은 값
        """
        try:
            value = float(theta)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} 는 실수여야 합니다: {theta!r}")
        if not math.isfinite(value) or value < -tolerance or value > math.pi / 2 + tolerance:
            raise ValidationError(f"{name} 는 [0, π/2] 범위여야 합니다: {value!r}")
        return min(max(value, 0.0), math.pi / 2)

    @staticmethod
    def check_probabilities(probabilities: Sequence[float], tolerance: float = FEASIBILITY_TOLERANCE) -> None:
        """
        확률 분포 검증 (음수 없음, 합 1)

        Raises:
            ValidationError: 음수 확률 또는 합 ≠ 1
        """
        if not probabilities:
            raise DimensionError("앙상블이 비어 있습니다")
        if any(not math.isfinite(p) or p < 0 for p in probabilities):
            raise ValidationError("확률은 음이 아닌 유한한 값이어야 합니다")
        total = math.fsum(probabilities)
        if abs(total - 1.0) > tolerance:
            raise ValidationError("확률의 합이 1 이 아닙니다", f"Σp = {total:.15g}")

    @staticmethod
    def check_tolerance(tolerance: Optional[float]) -> float:
        """허용치 검증 (양의 유한값), None 이면 기본값"""
        if tolerance is None:
            return DEFAULT_TOLERANCE
        if not math.isfinite(tolerance) or tolerance <= 0:
            raise ValidationError(f"허용치는 양수여야 합니다: {tolerance!r}")
        return float(tolerance)

    @staticmethod
    def report_log_path(directory: str, suite: str, seed: int, max_runs: int = 999) -> str:
        """
        verify 리포트 경로 결정

        verify_<스위트>_seed<시드>.log 를 쓰고, 같은 스위트와 시드로 이미
        실행한 리포트가 있으면 _2, _3 ... 실행 번호를 붙인다.

        Args:
            directory: 리포트 디렉토리
            suite: 스위트 이름 ("all" 포함)
            seed: 실행 시드
            max_runs: 같은 스위트/시드 조합의 최대 리포트 수

        Returns:
            기존 파일과 겹치지 않는 리포트 경로

        Raises:
            ValidationError: 같은 조합의 리포트가 max_runs 개 이상
        """
        stem = f"verify_{suite}_seed{seed}"
        folder = Path(directory)
        for run in range(1, max_runs + 1):
            name = f"{stem}.log" if run == 1 else f"{stem}_{run}.log"
            candidate = folder / name
            if not candidate.exists():
                return str(candidate)
        raise ValidationError(f"리포트 실행 번호가 {max_runs} 을 넘었습니다", str(folder / stem))
