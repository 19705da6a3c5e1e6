"""Run the acceptance gate and print one verdict line per criterion.

    python scripts/run_acceptance.py            # all criteria
    python scripts/run_acceptance.py -k c05     # a single criterion
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


def main(argv: list[str]) -> int:
    return pytest.main([str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider", *argv])


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
