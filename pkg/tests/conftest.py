import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Recorder for one acceptance criterion: acceptance(n, title) -> dict."""
    store = request.config.stash.setdefault(_RESULTS, {})

    class Recorder:
        def __call__(self, n, title):
            rec = {"title": title, "status": "FAIL", "detail": ""}
            store[n] = rec
            return rec

    return Recorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store):
        rec = store[n]
        line = f"criterion {n:2d} [{rec['status']}] {rec['title']}"
        if rec["detail"]:
            line += f": {rec['detail']}"
        terminalreporter.write_line(line)
