from importlib import resources

import numpy as np
import pytest

from helilqr import build_system, load_params_file

DATA = resources.files("helilqr") / "data"
SHIPPED_MODELS = sorted(p.name for p in DATA.iterdir() if p.name.endswith(".json"))


@pytest.fixture(scope="session")
def forward_system():
    return build_system(load_params_file(DATA / "r50_forward.json"))


@pytest.fixture(scope="session")
def hover_system():
    return build_system(load_params_file(DATA / "r50_hover.json"))


@pytest.fixture(params=SHIPPED_MODELS)
def shipped_system(request):
    return build_system(load_params_file(DATA / request.param))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS.values():
            terminalreporter.write_line(line)
