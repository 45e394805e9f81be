import pytest

N_CRITERIA = 14
_LINES: dict[int, str] = {}
_SEEN: set[int] = set()


@pytest.fixture
def criterion():
    """Record one acceptance criterion's outcome and fail the test if it did not hold."""
    def record(num: int, ok: bool, detail: str):
        _LINES[num] = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_LINES[num])
        assert ok, detail
    return record


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark:
        _SEEN.add(mark.args[0])


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _SEEN:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, N_CRITERIA + 1):
        if k in _LINES:
            terminalreporter.write_line(_LINES[k])
        elif k in _SEEN:
            terminalreporter.write_line(f"criterion {k:2d}: FAIL  did not complete")
