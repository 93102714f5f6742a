import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    from _acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(RESULTS, key=lambda c: c.number):
        terminalreporter.write_line(c.line())
    passed = sum(c.passed for c in RESULTS)
    terminalreporter.write_line(f"{passed}/{len(RESULTS)} acceptance criteria passed")
