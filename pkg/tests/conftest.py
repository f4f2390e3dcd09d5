import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "40")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


_CRITERIA: dict[int, list[tuple[str, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            status = "FAIL (known)" if rep.skipped else "PASS (unexpected)"
        else:
            status = "PASS" if rep.passed else "FAIL"
        _CRITERIA.setdefault(mark.args[0], []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        parts = _CRITERIA[n]
        ok = all(s == "PASS" for _, s in parts)
        bad = [f"{name}: {s}" for name, s in parts if s != "PASS"]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({len(parts)} check(s))"
        if bad:
            line += " -- " + "; ".join(bad)
        terminalreporter.write_line(line)
