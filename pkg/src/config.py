"""
설정 파일 (settings.ini) 관리 및 수치 허용치 기본값
"""

import configparser
import os
from pathlib import Path
from typing import Optional, Union

# 사용자 대상 검사 허용치
DEFAULT_TOLERANCE = 1e-9
# 내부 항등식 허용치
EXACT_TOLERANCE = 1e-12
# 코사인 비교 허용치 (가능성 판정)
FEASIBILITY_TOLERANCE = 1e-12

DEFAULT_CONVENTION = 'll'
DEFAULT_SEED = 7
DEFAULT_TRIALS = 100


class Config:
    """settings.ini 관리 클래스"""

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        # 기본 위치: 저장소 루트 (main.py 와 같은 디렉토리)
        if config_file is None:
            root_dir = Path(os.path.dirname(os.path.abspath(__file__))).parent
            config_file = root_dir / "settings.ini"
        self.config_file = Path(config_file)
        self.config = configparser.ConfigParser()
        self._load_or_create()

    def _load_or_create(self) -> None:
        """설정 파일 로드 또는 기본값으로 생성"""
        if self.config_file.exists():
            try:
                self.config.read(self.config_file, encoding='utf-8')
                # 필수 섹션 확인
                if not self.config.has_section('Numerics'):
                    self.config.add_section('Numerics')
                if not self.config.has_section('Defaults'):
                    self.config.add_section('Defaults')
            except configparser.Error:
                # 손상된 경우 기본값으로 재생성
                self.config = configparser.ConfigParser()
                self._create_default()
        else:
            self._create_default()

    def _create_default(self) -> None:
        """기본 설정 생성"""
        self.config['Numerics'] = {
            'tolerance': repr(DEFAULT_TOLERANCE)
        }
        self.config['Defaults'] = {
            'convention': DEFAULT_CONVENTION,
            'seed': str(DEFAULT_SEED),
            'trials': str(DEFAULT_TRIALS)
        }
        self._save()

    def _save(self) -> None:
        """설정 파일 저장"""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                self.config.write(f)
        except OSError:
            # 저장 실패 시 무시 (읽기 전용 설치 등)
            pass

    def _get_float(self, key: str, fallback: float) -> float:
        try:
            value = self.config.getfloat('Numerics', key, fallback=fallback)
            if value > 0:
                return value
        except ValueError:
            pass
        return fallback

    def _get_int(self, key: str, fallback: int) -> int:
        try:
            return self.config.getint('Defaults', key, fallback=fallback)
        except ValueError:
            return fallback

    def get_tolerance(self) -> float:
        """사용자 대상 허용치 가져오기"""
        return self._get_float('tolerance', DEFAULT_TOLERANCE)

    def get_convention(self) -> str:
        """기본 위상 규약 가져오기 ('ll' 또는 'sakurai')"""
        value = self.config.get('Defaults', 'convention', fallback=DEFAULT_CONVENTION).strip().lower()
        if value not in ('ll', 'sakurai'):
            return DEFAULT_CONVENTION
        return value

    def get_seed(self) -> int:
        """기본 시드 가져오기"""
        return self._get_int('seed', DEFAULT_SEED)

    def get_trials(self) -> int:
        """기본 시행 수 가져오기"""
        trials = self._get_int('trials', DEFAULT_TRIALS)
        return trials if trials > 0 else DEFAULT_TRIALS
