import pytest

_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    num, title = mark.args
    failed = rep.failed
    if rep.when == "call" or (failed and rep.when == "setup"):
        prev = _results.get(num, (title, True, 0.0))
        _results[num] = (title, prev[1] and not failed, prev[2] + rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_results):
        title, ok, secs = _results[num]
        tr.write_line(f"[{num:2d}] {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f} s)")
