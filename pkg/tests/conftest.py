import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:<3} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=_order):
            terminalreporter.write_line(line)


def _order(line: str):
    tag = line.split()[1]
    lead = len(tag) - len(tag.lstrip("0123456789"))
    return int(tag[:lead]), tag
