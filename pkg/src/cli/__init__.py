"""
명령줄 진입점

python main.py <subcommand> [옵션]
표준 출력에는 결과 JSON 문서만 쓰고, 로그는 표준 오류로 보낸다.
"""

import argparse
import logging
import math
import re
import sys
from typing import List, Optional

from src import __version__
from src.cli.commands import COMMANDS, RunContext
from src.cli.suites import SUITE_NAMES
from src.config import Config
from src.document import STDIO
from src.errors import FramenessError, UsageError

logger = logging.getLogger(__name__)

# "pi/3", "2pi/5", "0.5*pi" 형식
_PI_PATTERN = re.compile(r'^\s*(?P<coef>[0-9.]*)\s*\*?\s*pi\s*(?:/\s*(?P<den>[0-9.]+))?\s*$')
# "acos(0.25)" 형식
_ACOS_PATTERN = re.compile(r'^\s*(?:acos|arccos)\(\s*(?P<arg>[-+0-9.eE]+)\s*\)\s*$')


def parse_angle(text: str) -> float:
    """
    각 인자 파싱 (라디안 실수, "pi/3", "acos(0.25)")

    Raises:
        argparse.ArgumentTypeError: 해석할 수 없는 값
    """
    try:
        return float(text)
    except ValueError:
        pass
    match = _PI_PATTERN.match(text)
    if match:
        coef = float(match.group('coef')) if match.group('coef') not in (None, '', '.') else 1.0
        den = float(match.group('den')) if match.group('den') else 1.0
        if den == 0:
            raise argparse.ArgumentTypeError(f"0 으로 나눌 수 없습니다: {text}")
        return coef * math.pi / den
    match = _ACOS_PATTERN.match(text)
    if match:
        arg = float(match.group('arg'))
        if not -1.0 <= arg <= 1.0:
            raise argparse.ArgumentTypeError(f"acos 인자는 [-1, 1] 범위여야 합니다: {text}")
        return math.acos(arg)
    raise argparse.ArgumentTypeError(f"각을 해석할 수 없습니다: {text}")


class FramenessArgumentParser(argparse.ArgumentParser):
    """사용법 오류를 UsageError 로 바꾸는 파서 (종료 코드 64)"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = FramenessArgumentParser(add_help=False)
    common.add_argument("--convention", choices=["ll", "sakurai"], default=None,
                        help="TR 위상 규약 (기본: 설정 파일, 'll')")
    common.add_argument("--seed", type=int, default=None, help="난수 시드 (기본: 설정 파일)")
    common.add_argument("--trials", type=int, default=None, help="시행 수 (기본: 설정 파일)")
    common.add_argument("--tol", type=float, default=None, help="검사 허용치 (기본: 설정 파일)")
    common.add_argument("--input", default=STDIO, metavar="FILE|-", help="입력 JSON (기본: 표준 입력)")
    common.add_argument("--output", default=STDIO, metavar="FILE|-", help="결과 JSON (기본: 표준 출력)")
    common.add_argument("--config", default=None, metavar="FILE", help="settings.ini 경로")
    common.add_argument("-v", "--verbose", action="store_true", help="디버그 로그 출력")
    return common


def build_parser() -> FramenessArgumentParser:
    """하위 명령 파서 구성"""
    common = _common_options()
    parser = FramenessArgumentParser(
        prog="frameness",
        description="시간 반전 프레임성 자원 계산: 표준 형식, 단조량, TRIO 변환"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    sub.add_parser("standardize", parents=[common], help="상태를 표준 자원 형식으로 환원")
    sub.add_parser("tau", parents=[common], help="τ, τ∞ 와 TR 불변 여부")
    sub.add_parser("average", parents=[common], help="TR 그룹 평균 밀도 행렬")

    convert = sub.add_parser("convert", parents=[common], help="표준 자원 변환 측정 합성")
    convert.add_argument("mode", choices=["det", "ens", "pmax"], help="결정적 / 앙상블 / 최대 확률")
    convert.add_argument("--theta", type=parse_angle, required=True, help="입력 각 θ")
    convert.add_argument("--gamma", type=parse_angle, default=None, help="목표 각 γ (det, pmax)")
    convert.add_argument("--ensemble", default=None, metavar="FILE", help="목표 앙상블 JSON (ens)")

    rate = sub.add_parser("rate", parents=[common], help="점근 변환 비율")
    rate.add_argument("--theta-psi", type=parse_angle, required=True)
    rate.add_argument("--theta-phi", type=parse_angle, required=True)

    copies = sub.add_parser("copies", parents=[common], help="n 사본에서의 최대 목표 사본 수")
    copies.add_argument("-n", type=int, required=True, help="입력 사본 수")
    copies.add_argument("--theta-psi", type=parse_angle, required=True)
    copies.add_argument("--theta-phi", type=parse_angle, required=True)

    power = sub.add_parser("power", parents=[common], help="텐서 거듭제곱의 표준 각")
    power.add_argument("--theta", type=parse_angle, required=True)
    power.add_argument("-n", type=int, required=True)

    verify = sub.add_parser("verify", parents=[common], help="속성 검증 스위트 실행")
    verify.add_argument("suite", help=f"스위트 이름 ({', '.join(SUITE_NAMES)}, all)")
    verify.add_argument("--report", default=None, metavar="FILE|DIR", help="텍스트 리포트 로그 파일 (디렉토리면 자동 이름)")
    return parser


def _configure_logging(verbose: bool) -> None:
    # 호출 시점의 stderr 에 붙인다 (반복 호출 시 이전 핸들러 교체)
    root = logging.getLogger("src")
    for handler in list(root.handlers):
        if getattr(handler, "_frameness", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._frameness = True
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI 실행

    Returns:
        종료 코드 (0 성공, 1 검증 실패/시스템 오류, 2 가능성 위반, 64 사용법, 65 입력 오류)
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    _configure_logging("-v" in argv or "--verbose" in argv)
    try:
        args = build_parser().parse_args(argv)
        context = RunContext.from_args(args, Config(args.config))
        document = COMMANDS[args.command](context, args)
        document.write(context.output)
        if document.outputs.get("success") is False:
            logger.warning("검증 실패가 있습니다")
            return 1
        return 0
    except FramenessError as e:
        print(str(e), file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"[오류] 파일 입출력 실패: {e}", file=sys.stderr)
        return 1
