import pytest

_results: dict[int, tuple[str, list[str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    _, failed = _results.setdefault(number, (title, []))
    if rep.failed or (rep.when == "call" and rep.skipped):
        failed.append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, failed = _results[number]
        status = "FAIL" if failed else "PASS"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
