"""Shared pytest plumbing: the acceptance-criteria summary block.

Acceptance tests call record_criterion() once each; the collected
verdicts are printed as one PASS/FAIL line per criterion after the run,
outside pytest's output capture, so the summary survives plain
``pytest -v`` output.
"""

_CRITERIA = []


def record_criterion(name, ok, detail):
    _CRITERIA.append((name, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{verdict} - {name} - {detail}")
