"""Run the acceptance checks and print one PASS/FAIL line per criterion.

    python3 scripts/run_acceptance.py            # all seven criteria
    python3 scripts/run_acceptance.py -k "not slow"

Extra arguments are passed to pytest.  The exit status is pytest's.
"""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    args = [str(ROOT / "tests" / "test_acceptance.py"), "-q", "-s", "-p", "no:cacheprovider", *sys.argv[1:]]
    sys.exit(pytest.main(args))
