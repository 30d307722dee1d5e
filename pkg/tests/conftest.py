import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def panel():
    from qorc.synthetic import generate_synthetic

    return generate_synthetic(500, 42)


@pytest.fixture(scope="session")
def default_run(panel):
    import time

    from qorc.pipeline import PipelineConfig, run_train

    start = time.perf_counter()
    result = run_train(PipelineConfig(), panel)
    result.timings["wall_seconds"] = time.perf_counter() - start
    return result
