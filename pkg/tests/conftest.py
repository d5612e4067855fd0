import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "vnf",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "vnf"))

FIELDS = ["Q", "Q(sqrt,-1)", "Q(sqrt,5)", "Q(sqrt,-5)", "Q(sqrt,2)", "Q(sqrt,-3)", "Q(sqrt,13)", "Q(sqrt,-7)"]
QUADRATIC = [f for f in FIELDS if f != "Q"]


@pytest.fixture(params=FIELDS)
def field(request):
    from vnf import numberfield as nf

    return nf.make_field(request.param)


@pytest.fixture(params=QUADRATIC)
def quad_field(request):
    from vnf import numberfield as nf

    return nf.make_field(request.param)

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
