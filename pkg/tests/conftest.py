import pytest

RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="run the extended n = 4 tier")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="extended tier; pass --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    """record(criterion, ok, detail): print now and in the terminal summary."""

    def _record(k: int, ok: bool, detail: str):
        RESULTS[k] = (ok, detail)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return _record
