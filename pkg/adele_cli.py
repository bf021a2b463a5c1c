#!/usr/bin/env python3
"""
Adele Lab entry point
Run from the repository root: python adele_cli.py log wieferich --alpha 2 --target 0 --hi 10000
"""

import os
import sys

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from adele_lab.cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
