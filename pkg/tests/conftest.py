import csv
import math
from pathlib import Path

import pytest

from enantiostark._cli import write_csv_file

GOLDEN_DIR = Path(__file__).parent / "golden"


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="rewrite the pinned CSV tables in tests/golden instead of comparing against them",
    )


def _read_csv(path):
    with path.open(encoding="utf-8", newline="") as file:
        return list(csv.reader(file))


def _cells_match(actual, expected, abs_tol):
    try:
        a, e = float(actual), float(expected)
    except ValueError:
        return actual == expected
    if math.isnan(e):
        return math.isnan(a)
    return a == pytest.approx(e, rel=0, abs=abs_tol)


@pytest.fixture
def golden(request):
    """Compare a CSV table with its pinned copy under tests/golden, cell by cell."""
    update = request.config.getoption("--update-golden")

    def check(name, table, *, abs_tol=1e-9):
        header, *rows = table
        path = GOLDEN_DIR / name
        if update:
            GOLDEN_DIR.mkdir(exist_ok=True)
            write_csv_file(path, header, rows)
            return
        if not path.exists():
            pytest.skip(f"no pinned table {name}, create it with --update-golden")

        expected_header, *expected_rows = _read_csv(path)
        assert header == expected_header
        assert len(rows) == len(expected_rows)
        for row, expected in zip(rows, expected_rows):
            assert len(row) == len(expected)
            for actual_cell, expected_cell in zip(row, expected):
                assert _cells_match(actual_cell, expected_cell, abs_tol), (row, expected)

    return check
