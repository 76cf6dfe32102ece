import pytest

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body asserts, the hook prints."""
    name = request.node.name

    def record(label: str, passed: bool, detail: str = ""):
        _CRITERIA[label] = (passed, detail)
        assert passed, f"{label}: {detail}"

    yield record
    rep = getattr(request.node, "rep_call", None)
    if rep is not None and rep.failed:
        for label, (passed, detail) in list(_CRITERIA.items()):
            if label.startswith(name):
                _CRITERIA[label] = (False, detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split()[0]) if s.split()[0].isdigit() else 99):
        passed, detail = _CRITERIA[label]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}  {detail}")
