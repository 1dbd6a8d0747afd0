import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("FORMLAB_HYPOTHESIS", "default"))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import OUTCOME_LINES

    if OUTCOME_LINES:
        terminalreporter.section("acceptance criteria")
        for line in OUTCOME_LINES:
            terminalreporter.write_line(line)
