"""
Time-Reversal Frameness Toolkit
시간 반전 프레임성 자원 이론 계산 도구 (표준 형식, 단조량, TRIO 변환)
"""

__version__ = "1.0.0"
