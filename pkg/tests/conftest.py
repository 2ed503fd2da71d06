import pytest

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record ``(passed, detail)`` for an acceptance criterion under its number."""
    table = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(num: int, passed: bool, detail: str) -> None:
        table[num] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_ACCEPTANCE, {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(table):
        ok, detail = table[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}")
