import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA[n] = (title, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")


@pytest.fixture(scope="session")
def cli_s2(tmp_path_factory):
    """One `enumerate --s 2` run through the CLI: (output dir, exit code, seconds)."""
    import time
    from distance5.cli import main
    out = tmp_path_factory.mktemp("s2_one_worker")
    t0 = time.perf_counter()
    code = main(["--out", str(out), "enumerate", "--s", "2", "--workers", "1"])
    return out, code, time.perf_counter() - t0


@pytest.fixture(scope="session")
def s2_run(cli_s2):
    """The default s = 2 search read back from the CLI run: (survivors, trace, seconds)."""
    import json
    from distance5.report import load_traces
    out, _, dt = cli_s2
    survivors = json.loads((out / "survivors.json").read_text())
    (trace,) = load_traces([out / "trace.json"])
    return survivors, trace, dt
