"""
오류 코드 및 예외 정의
검증 결과(속성 검사) 컨테이너 포함
"""

import os
from typing import Optional, List, Dict
from dataclasses import dataclass, field
from collections import defaultdict


class FramenessError(Exception):
    """프레임성 도구 기본 예외"""

    # CLI 종료 코드
    exit_code = 1

    def __init__(self, code: int, message: str, detail: Optional[str] = None):
        self.code = code
        self.message = message
        self.detail = detail
        super().__init__(f"[오류 {code}] {message}" + (f": {detail}" if detail else ""))


# 입력 검증 오류 (100번대)
class ValidationError(FramenessError):
    """입력 검증 오류"""
    exit_code = 65

    def __init__(self, message: str, detail: Optional[str] = None, code: int = 100):
        super().__init__(code, message, detail)


class InvalidLabel(ValidationError):
    """각운동량 라벨 오류 (101)"""
    def __init__(self, ell: int, m: int, detail: Optional[str] = None):
        super().__init__(f"잘못된 라벨입니다 (ℓ={ell}, m={m}, |m| ≤ ℓ 이어야 함)", detail, code=101)
        self.ell = ell
        self.m = m


class NormalizationError(ValidationError):
    """상태 정규화 오류 (102)"""
    def __init__(self, norm: float, tolerance: float):
        defect = abs(norm - 1.0)
        super().__init__(
            f"상태가 정규화되지 않았습니다 (노름 {norm:.12g}, 결함 {defect:.3e} > 허용치 {tolerance:.1e})",
            code=102
        )
        self.norm = norm
        self.defect = defect


class BasisError(ValidationError):
    """기저 불일치 (103)"""
    def __init__(self, expected: str, found: str):
        super().__init__(f"기저가 맞지 않습니다 (필요: {expected}, 입력: {found})", code=103)


class IncompleteSpace(ValidationError):
    """m ↔ −m 에 대해 닫혀 있지 않은 라벨 집합 (104)"""
    def __init__(self, missing: List[str]):
        super().__init__(
            "라벨 집합이 m ↔ −m 에 대해 닫혀 있지 않습니다",
            "누락: " + ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else ""),
            code=104
        )
        self.missing = missing


class DimensionError(ValidationError):
    """차원 불일치 (105)"""
    def __init__(self, message: str):
        super().__init__(message, code=105)


class SizeError(ValidationError):
    """허용 범위를 넘는 크기 (106)"""
    def __init__(self, name: str, value: int, low: int, high: int):
        super().__init__(f"{name}={value} 은(는) 허용 범위 [{low}, {high}] 밖입니다", code=106)


class ParseError(ValidationError):
    """
    문서 파싱 오류 (107)

    Attributes:
        line_number: 오류가 발생한 줄 번호 (선택)
        field_name: 오류가 발생한 필드 경로 (선택)
        file_path: 입력 파일 경로 (선택)
    """

    def __init__(
        self,
        message: str,
        line_number: Optional[int] = None,
        field_name: Optional[str] = None,
        file_path: Optional[str] = None
    ):
        self.line_number = line_number
        self.field_name = field_name
        self.file_path = file_path
        super().__init__(message, self.format_location() or None, code=107)

    def format_location(self) -> str:
        """
        위치 정보를 포맷팅하여 반환

        Returns:
            포맷된 위치 정보 문자열
        """
        parts = []

        if self.file_path:
            parts.append(f"파일: {os.path.basename(self.file_path)}")

        if self.line_number is not None:
            parts.append(f"라인 {self.line_number}")

        if self.field_name:
            parts.append(f"필드 '{self.field_name}'")

        return " | ".join(parts)


# 자원 이론 가능성 오류 (200번대)
class FeasibilityError(FramenessError):
    """변환 불가능"""
    exit_code = 2


class MonotoneViolation(FeasibilityError):
    """단조량 위반 (201)"""
    def __init__(self, before: float, after: float, detail: Optional[str] = None):
        super().__init__(
            201,
            f"TRIO 로는 τ 를 증가시킬 수 없습니다 (τ 변환 전 {before:.12g} < 변환 후 {after:.12g})",
            detail
        )
        self.before = before
        self.after = after


class InvalidTarget(FeasibilityError):
    """목표 자원 오류 (202)"""
    def __init__(self, message: str):
        super().__init__(202, message)


# 시스템 오류 (300번대)
class SystemError(FramenessError):
    """시스템 오류"""
    pass


class UsageError(SystemError):
    """명령행 사용법 오류 (301)"""
    exit_code = 64

    def __init__(self, message: str):
        super().__init__(301, message)


class InsufficientMemoryError(SystemError):
    """메모리 부족 (302)"""
    def __init__(self, required: int, available: int):
        super().__init__(
            302,
            "메모리가 부족합니다. 차원이나 사본 수를 줄여주세요",
            f"필요 {required / 2**20:.1f} MiB, 사용 가능 {available / 2**20:.1f} MiB"
        )


@dataclass
class PropertyCheck:
    """
    속성 하나에 대한 검사 집계

    Attributes:
        suite: 스위트 이름
        name: 속성 이름
        passed: 통과한 시행 수
        failed: 실패한 시행 수
        max_defect: 관측된 최대 결함
        notes: 실패 위치 등 부가 설명
    """
    suite: str
    name: str
    passed: int = 0
    failed: int = 0
    max_defect: float = 0.0
    notes: List[str] = field(default_factory=list)

    def record(self, ok: bool, defect: float = 0.0, note: Optional[str] = None) -> None:
        """시행 결과 하나를 기록"""
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if note and len(self.notes) < 10:
                self.notes.append(note)
        self.max_defect = max(self.max_defect, float(defect))

    @property
    def success(self) -> bool:
        return self.failed == 0


@dataclass
class VerificationResult:
    """
    검증 스위트 결과를 담는 컨테이너 클래스

    Attributes:
        success: 모든 속성 통과 여부
        checks: 속성별 검사 결과
        seed: 사용한 난수 시드
        trials: 속성당 시행 수
    """
    success: bool
    checks: List[PropertyCheck] = field(default_factory=list)
    seed: Optional[int] = None
    trials: Optional[int] = None

    @staticmethod
    def from_checks(checks: List[PropertyCheck], seed: Optional[int] = None,
                    trials: Optional[int] = None) -> "VerificationResult":
        return VerificationResult(
            success=all(c.success for c in checks),
            checks=checks,
            seed=seed,
            trials=trials
        )

    def group_by_suite(self) -> Dict[str, List[PropertyCheck]]:
        """
        검사를 스위트별로 그룹핑

        Returns:
            스위트 이름을 키로 하는 검사 리스트 딕셔너리
        """
        grouped: Dict[str, List[PropertyCheck]] = defaultdict(list)

        for check in self.checks:
            grouped[check.suite].append(check)

        return dict(grouped)

    def format_report(self) -> str:
        """
        검증 리포트를 포맷팅하여 반환

        Returns:
            포맷된 리포트 문자열
        """
        if not self.checks:
            return "검사한 속성이 없습니다."

        report_lines = []
        grouped = self.group_by_suite()

        for suite in sorted(grouped.keys()):
            report_lines.append(f"\n=== 스위트: {suite} ===")

            for check in grouped[suite]:
                status = "통과" if check.success else "실패"
                report_lines.append(
                    f"  • {check.name}: {status} "
                    f"({check.passed}/{check.passed + check.failed}, 최대 결함 {check.max_defect:.3e})"
                )
                for note in check.notes:
                    report_lines.append(f"    {note}")

        # 요약
        failed = sum(1 for c in self.checks if not c.success)
        report_lines.append(f"\n총 {len(self.checks)}개 속성 중 {failed}개 실패")

        return "\n".join(report_lines)

    def save_to_log_file(self, log_path: str) -> None:
        """
        검증 리포트를 로그 파일로 저장

        Args:
            log_path: 로그 파일 경로
        """
        report = self.format_report()

        with open(log_path, 'w', encoding='utf-8') as f:
            f.write("=" * 60 + "\n")
            f.write("Frameness Verification Report\n")
            if self.seed is not None:
                f.write(f"seed={self.seed} trials={self.trials}\n")
            f.write("=" * 60 + "\n")
            f.write(report)
            f.write("\n" + "=" * 60 + "\n")
