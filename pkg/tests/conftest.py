import pytest

_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_KEY] = {}


@pytest.fixture
def record(request):
    """Store one acceptance verdict; printed in the terminal summary."""
    store = request.config.stash[_KEY]

    def _record(number, title, ok, detail=""):
        store[number] = (title, bool(ok), detail)
        print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_KEY, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store):
        title, ok, detail = store[n]
        terminalreporter.write_line(f"{n:2d}  {'PASS' if ok else 'FAIL'}  {title}  {detail}")
