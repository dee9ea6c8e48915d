"""
Time-Reversal Frameness Toolkit - Main Entry
python main.py <standardize|tau|convert|rate|copies|power|average|verify> [옵션]
"""

import sys

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
