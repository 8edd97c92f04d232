"""Run the acceptance checks and print one PASS/FAIL line each.

    python scripts/run_acceptance.py            # all
    python scripts/run_acceptance.py 3 9        # selected
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from test_acceptance import CRITERIA, report  # noqa: E402


def main(argv):
    picked = [int(a) for a in argv] or sorted(CRITERIA)
    failed = 0
    for number in picked:
        ok, detail = CRITERIA[number]()
        report(number, ok, detail)
        failed += not ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
