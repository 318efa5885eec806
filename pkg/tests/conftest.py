import random
from pathlib import Path

import pytest

from huspull.model import SCALE, ProfitTable, QItem, QSeqDatabase, QSequence, load_database

DATA = Path(__file__).parent / "data"

# item-ids of the running example
A, B, C, D, E, F = 1, 2, 3, 4, 5, 6


def dollars(x) -> int:
    return round(x * SCALE)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def example_db():
    return load_database(DATA / "example.db", DATA / "example.prof")


def random_db(seed: int, max_seqs=25, max_items=6, max_len=10, max_qty=5, max_profit=10) -> QSeqDatabase:
    """Small random database: integer profits, quantities 1..max_qty."""
    rng = random.Random(seed)
    n_items = rng.randint(1, max_items)
    profits = ProfitTable({i: rng.randint(1, max_profit) * SCALE for i in range(1, n_items + 1)})
    seqs = []
    for sid in range(1, rng.randint(1, max_seqs) + 1):
        remaining = rng.randint(1, max_len)
        itemsets = []
        while remaining > 0:
            k = rng.randint(1, min(remaining, n_items))
            items = sorted(rng.sample(range(1, n_items + 1), k))
            itemsets.append([QItem(i, rng.randint(1, max_qty)) for i in items])
            remaining -= k
        seqs.append(QSequence.build(sid, itemsets, profits))
    return QSeqDatabase(tuple(seqs), profits)


# --- acceptance report: one PASS/FAIL line per criterion -----------------

_criteria: dict[int, list] = {}
_notes: dict[int, list[str]] = {}


@pytest.fixture
def note(request):
    """Attach a line of measurements to the current criterion's report."""
    mark = request.node.get_closest_marker("criterion")
    return lambda text: _notes.setdefault(mark.args[0] if mark else 0, []).append(text)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and not report.failed):
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, [title, True, ""])
    if report.failed:
        entry[1] = False
        crash = getattr(report.longrepr, "reprcrash", None)
        if not entry[2]:
            entry[2] = crash.message if crash else "error"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, why = _criteria[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if not ok and why:
            line += f"  ({why.splitlines()[0][:120]})"
        terminalreporter.write_line(line)
        for text in _notes.get(number, []):
            terminalreporter.write_line(f"    {text}")
