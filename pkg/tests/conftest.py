import pytest

ACCEPTANCE = {}


def record_criterion(num, description, passed, detail=""):
    ACCEPTANCE[num] = (description, bool(passed), detail)


@pytest.fixture
def criterion():
    """Record one acceptance-criterion outcome for the summary table."""
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        desc, ok, detail = ACCEPTANCE[num]
        line = f"criterion {num:2d}  {'PASS' if ok else 'FAIL'}  {desc}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
