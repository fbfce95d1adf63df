import numpy as np
import pytest

from cresa.distributions import sample_matrix
from cresa.estimators import SampleMatrix
from cresa.models import default_inputs, get_model

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}")


def given_data(model_name: str, n: int, seed: int) -> SampleMatrix:
    model = get_model(model_name)
    x = sample_matrix(default_inputs(model_name), n, seed)
    return SampleMatrix(x, model(x), model.labels, seed)


@pytest.fixture(scope="session")
def ishigami_20k() -> SampleMatrix:
    return given_data("ishigami", 20000, 0)


@pytest.fixture(scope="session")
def ishigami_40k() -> SampleMatrix:
    return given_data("ishigami", 40000, 0)
