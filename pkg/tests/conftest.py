import pytest

ACCEPTANCE = []


@pytest.fixture
def accept():
    """Record one acceptance criterion outcome; the summary prints after the run."""

    def record(number, name, passed, detail=""):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {name}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE.append((number, line))
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
