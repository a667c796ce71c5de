import pytest

# (number, description, passed, detail) tuples recorded by the
# acceptance tests; printed as one line per criterion after the run.
_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    def record(number, description, passed, detail=""):
        _ACCEPTANCE.append((int(number), description, bool(passed),
                            detail))
        assert passed, "criterion %d (%s) failed: %s" % (number,
                                                         description,
                                                         detail)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed, detail in sorted(_ACCEPTANCE):
        line = "ACCEPTANCE %2d %s  %s" % (number,
                                          "PASS" if passed else "FAIL",
                                          description)
        if detail:
            line += "  [%s]" % detail
        terminalreporter.write_line(line)
