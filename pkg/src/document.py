"""
JSON 입출력 문서

StateDocument: 상태 입력 (기저, 규약, 라벨, [re, im] 진폭)
ResultDocument: 명령 결과 (정렬된 키, "inf" 표식, 입력 요약 해시)
"""

import hashlib
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import chardet
import numpy as np

from src import __version__
from src.angular import (
    AngularLabel,
    Basis,
    Label,
    PhaseConvention,
    ProductLabel,
    PureState,
    SelfConjLabel,
)
from src.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

# τ∞ 발산 표식
INF_SENTINEL = "inf"
# 표준 입출력을 가리키는 경로
STDIO = "-"


class DocumentReader:
    """입력 파일 읽기 (인코딩 감지 포함)"""

    @staticmethod
    def detect_encoding(filepath: str) -> str:
        """
        파일 인코딩 감지

        UTF-8 BOM → UTF-8 → CP949 → chardet (신뢰도 0.7 이상) 순서.

        Raises:
            ParseError: 인코딩 감지 실패
        """
        # 1. UTF-8 BOM 체크
        try:
            with open(filepath, 'rb') as f:
                if f.read(3) == b'\xef\xbb\xbf':
                    return 'utf-8-sig'
        except OSError as e:
            raise ParseError(f"파일을 열 수 없습니다: {e.strerror}", file_path=filepath)

        # 2. UTF-8, 3. CP949
        for encoding in ('utf-8', 'cp949'):
            try:
                with open(filepath, 'r', encoding=encoding) as f:
                    f.read()
                return encoding
            except UnicodeDecodeError:
                continue

        # 4. chardet 로 자동 감지
        with open(filepath, 'rb') as f:
            result = chardet.detect(f.read())
        if result.get('encoding') and result.get('confidence', 0.0) >= 0.7:
            return result['encoding']

        raise ParseError("파일 인코딩을 감지할 수 없습니다", file_path=filepath)

    @staticmethod
    def read_text(source: str) -> str:
        """파일 또는 표준 입력('-') 의 전체 텍스트"""
        if source == STDIO:
            return sys.stdin.read()
        encoding = DocumentReader.detect_encoding(source)
        logger.debug("%s 인코딩: %s", source, encoding)
        with open(source, 'r', encoding=encoding) as f:
            return f.read()

    @staticmethod
    def load_json(text: str, file_path: Optional[str] = None) -> Any:
        """
        JSON 파싱

        Raises:
            ParseError: JSON 문법 오류 (줄 번호 포함)
        """
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"JSON 형식 오류: {e.msg}", line_number=e.lineno, file_path=file_path)

    @staticmethod
    def read_json(source: str) -> Any:
        path = None if source == STDIO else source
        return DocumentReader.load_json(DocumentReader.read_text(source), path)


def _type_name(kind: Any) -> str:
    if isinstance(kind, tuple):
        return "/".join(k.__name__ for k in kind)
    return kind.__name__


def _require(data: Dict[str, Any], key: str, kind: Any, where: str, file_path: Optional[str]) -> Any:
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"필수 필드가 없습니다: {key}", field_name=f"{where}{key}", file_path=file_path)
    value = data[key]
    if kind is int and isinstance(value, bool):
        raise ParseError(f"{key} 는 정수여야 합니다", field_name=f"{where}{key}", file_path=file_path)
    if not isinstance(value, kind):
        raise ParseError(
            f"{key} 의 형식이 잘못되었습니다 (기대: {_type_name(kind)})",
            field_name=f"{where}{key}", file_path=file_path
        )
    return value


def _parse_number(value: Any, field_name: str, file_path: Optional[str]) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("숫자가 필요합니다", field_name=field_name, file_path=file_path)
    return float(value)


@dataclass
class StateDocument:
    """
    상태 입력 문서

    Attributes:
        basis: "angular" 또는 "self-conjugate"
        convention: "ll" 또는 "sakurai"
        labels: 라벨 레코드 ({"mu", "ell", "m", "eps"} 또는 {"factors": [...]})
        amplitudes: [re, im] 쌍 목록
    """
    basis: str
    convention: str
    labels: List[Dict[str, Any]] = field(default_factory=list)
    amplitudes: List[List[float]] = field(default_factory=list)

    @staticmethod
    def from_dict(data: Any, file_path: Optional[str] = None) -> "StateDocument":
        """
        JSON 객체에서 문서 생성 (필드 구조만 검사)

        Raises:
            ParseError: 필드 누락 또는 형식 오류
        """
        if not isinstance(data, dict):
            raise ParseError("상태 문서는 JSON 객체여야 합니다", file_path=file_path)
        basis = _require(data, "basis", str, "", file_path)
        convention = data.get("convention", PhaseConvention.LANDAU_LIFSHITZ.value)
        if not isinstance(convention, str):
            raise ParseError("convention 은 문자열이어야 합니다", field_name="convention", file_path=file_path)
        labels = _require(data, "labels", list, "", file_path)
        amplitudes = _require(data, "amplitudes", list, "", file_path)

        if len(labels) != len(amplitudes):
            raise ParseError(
                f"라벨 수({len(labels)})와 진폭 수({len(amplitudes)})가 다릅니다",
                field_name="amplitudes", file_path=file_path
            )
        pairs = []
        for i, pair in enumerate(amplitudes):
            where = f"amplitudes[{i}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError("진폭은 [re, im] 쌍이어야 합니다", field_name=where, file_path=file_path)
            pairs.append([_parse_number(pair[0], where, file_path), _parse_number(pair[1], where, file_path)])
        for i, record in enumerate(labels):
            if not isinstance(record, dict):
                raise ParseError("라벨은 JSON 객체여야 합니다", field_name=f"labels[{i}]", file_path=file_path)
        return StateDocument(basis=basis, convention=convention, labels=labels, amplitudes=pairs)

    @staticmethod
    def _parse_label(record: Dict[str, Any], basis: Basis, where: str) -> Label:
        if "factors" in record:
            factors = record["factors"]
            if not isinstance(factors, list):
                raise ParseError("factors 는 목록이어야 합니다", field_name=f"{where}.factors")
            return ProductLabel(tuple(
                StateDocument._parse_label(f, basis, f"{where}.factors[{j}]") for j, f in enumerate(factors)
            ))
        mu = record.get("mu", 1)
        ell = _require(record, "ell", int, f"{where}.", None)
        m = _require(record, "m", int, f"{where}.", None)
        if isinstance(mu, bool) or not isinstance(mu, int):
            raise ParseError("mu 는 정수여야 합니다", field_name=f"{where}.mu")
        if basis is Basis.ANGULAR:
            return AngularLabel(mu, ell, m)
        return SelfConjLabel(mu, ell, m, record.get("eps", '+'))

    def parse_basis(self) -> Basis:
        for basis in Basis:
            if basis.value == self.basis:
                return basis
        raise ParseError(f"알 수 없는 기저: {self.basis}", field_name="basis")

    def parse_convention(self) -> PhaseConvention:
        try:
            return PhaseConvention.parse(self.convention)
        except ValidationError:
            raise ParseError(f"알 수 없는 위상 규약: {self.convention}", field_name="convention")

    def to_state(self) -> PureState:
        """
        PureState 로 변환

        Raises:
            ParseError: 라벨 필드 오류
            ValidationError: 라벨 값 또는 상태 불변식 위반
        """
        basis = self.parse_basis()
        labels = [StateDocument._parse_label(r, basis, f"labels[{i}]") for i, r in enumerate(self.labels)]
        amplitudes = [complex(re, im) for re, im in self.amplitudes]
        if not labels:
            raise ParseError("상태가 비어 있습니다", field_name="labels")
        return PureState.from_labels(labels, amplitudes)

    @staticmethod
    def _label_record(label: Label) -> Dict[str, Any]:
        if isinstance(label, ProductLabel):
            return {"factors": [StateDocument._label_record(f) for f in label.factors]}
        record: Dict[str, Any] = {"mu": label.mu, "ell": label.ell, "m": label.m}
        if isinstance(label, SelfConjLabel):
            record["eps"] = label.eps
        return record

    @staticmethod
    def from_state(psi: PureState, convention: PhaseConvention = PhaseConvention.LANDAU_LIFSHITZ) -> "StateDocument":
        return StateDocument(
            basis=psi.basis.value,
            convention=PhaseConvention.parse(convention).value,
            labels=[StateDocument._label_record(label) for label in psi.labels],
            amplitudes=[[float(a.real), float(a.imag)] for a in psi.amp]
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basis": self.basis,
            "convention": self.convention,
            "labels": self.labels,
            "amplitudes": self.amplitudes,
        }

    @staticmethod
    def read(source: str) -> Tuple["StateDocument", PureState]:
        """파일/표준 입력에서 문서와 상태를 읽는다"""
        path = None if source == STDIO else source
        document = StateDocument.from_dict(DocumentReader.read_json(source), path)
        try:
            return document, document.to_state()
        except ParseError as e:
            raise ParseError(e.message, e.line_number, e.field_name, path)


class EnsembleDocument:
    """앙상블 파일: {"items": [{"p": 0.5, "gamma": 0.0}, ...]} 또는 [[p, γ], ...]"""

    @staticmethod
    def parse(data: Any, file_path: Optional[str] = None) -> List[Tuple[float, float]]:
        """
        (p, γ) 쌍 목록으로 변환

        Raises:
            ParseError: 구조 또는 형식 오류
        """
        items = data.get("items") if isinstance(data, dict) else data
        if not isinstance(items, list) or not items:
            raise ParseError("앙상블 항목 목록이 필요합니다", field_name="items", file_path=file_path)

        pairs = []
        for i, item in enumerate(items):
            where = f"items[{i}]"
            if isinstance(item, dict):
                p = _require(item, "p", (int, float), f"{where}.", file_path)
                gamma = _require(item, "gamma", (int, float), f"{where}.", file_path)
            elif isinstance(item, list) and len(item) == 2:
                p, gamma = item
            else:
                raise ParseError("항목은 {p, gamma} 또는 [p, γ] 이어야 합니다", field_name=where, file_path=file_path)
            pairs.append((_parse_number(p, f"{where}.p", file_path), _parse_number(gamma, f"{where}.gamma", file_path)))
        return pairs

    @staticmethod
    def read(source: str) -> List[Tuple[float, float]]:
        path = None if source == STDIO else source
        return EnsembleDocument.parse(DocumentReader.read_json(source), path)


def encode_value(value: Any) -> Any:
    """
    결과 값을 JSON 호환 형태로 변환

    복소수 → [re, im], 실수 행렬 → 중첩 목록, 무한대 → "inf".
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return INF_SENTINEL if value > 0 else "-" + INF_SENTINEL
        if math.isnan(value):
            raise ValidationError("결과에 NaN 이 포함되었습니다")
        return value
    if isinstance(value, (complex, np.complexfloating)):
        return [encode_value(value.real), encode_value(value.imag)]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value) and np.any(value.imag != 0):
            return encode_value(value.tolist())
        return encode_value(np.real(value).tolist())
    if isinstance(value, dict):
        return {str(k): encode_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    raise ValidationError(f"직렬화할 수 없는 값입니다: {type(value).__name__}")


def decode_float(value: Any) -> float:
    """"inf" 표식을 포함한 실수 복원"""
    if value == INF_SENTINEL:
        return math.inf
    if value == "-" + INF_SENTINEL:
        return -math.inf
    return float(value)


def canonical_json(value: Any) -> str:
    return json.dumps(encode_value(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass
class ResultDocument:
    """
    명령 결과 문서

    Attributes:
        command: 실행한 명령 (예: "convert det")
        inputs: 입력 요약 (인자와 상태 문서)
        outputs: 결과 값 (JSON 호환 형태로 저장)
        seed: 난수 시드 (없으면 None)
        tool_version: 도구 버전
    """
    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    tool_version: str = __version__

    def __post_init__(self):
        self.inputs = encode_value(self.inputs)
        self.outputs = encode_value(self.outputs)

    @property
    def inputs_digest(self) -> str:
        """입력의 정규 JSON sha256"""
        return hashlib.sha256(canonical_json(self.inputs).encode("utf-8")).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "inputs_digest": self.inputs_digest,
            "outputs": self.outputs,
            "seed": self.seed,
            "tool_version": self.tool_version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def from_json(text: str, file_path: Optional[str] = None) -> "ResultDocument":
        """
        to_json 출력에서 문서 복원

        Raises:
            ParseError: 필드 누락 또는 입력 해시 불일치
        """
        data = DocumentReader.load_json(text, file_path)
        command = _require(data, "command", str, "", file_path)
        document = ResultDocument(
            command=command,
            inputs=_require(data, "inputs", dict, "", file_path),
            outputs=_require(data, "outputs", dict, "", file_path),
            seed=data.get("seed"),
            tool_version=data.get("tool_version", __version__)
        )
        digest = data.get("inputs_digest")
        if digest is not None and digest != document.inputs_digest:
            raise ParseError("입력 해시가 일치하지 않습니다", field_name="inputs_digest", file_path=file_path)
        return document

    def write(self, destination: str) -> None:
        """파일 또는 표준 출력('-') 에 기록"""
        text = self.to_json()
        if destination == STDIO:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        with open(destination, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info("결과 저장: %s", destination)
