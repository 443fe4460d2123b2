from hypothesis import settings

from acceptance_log import RESULTS

# exact arithmetic makes per-example timing noisy; no deadlines
settings.register_profile("default", deadline=None)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
