import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def report_criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(label: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE.append((label, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")


@pytest.fixture(scope="session")
def record_208():
    raw = (DATA / "mitdb" / "208_mlii.bin16").read_bytes()
    return np.frombuffer(raw, dtype="<i2").astype(np.int64)
