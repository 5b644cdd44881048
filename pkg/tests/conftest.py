from pathlib import Path

import pytest

from pulseflip.backend import load_backend

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
BACKEND_FILES = sorted(CONFIGS.glob("*.json"))

# criterion lines recorded by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def valencia_path():
    return CONFIGS / "valencia-like.json"


@pytest.fixture(scope="session")
def valencia(valencia_path):
    return load_backend(valencia_path)


@pytest.fixture(scope="session", params=BACKEND_FILES, ids=lambda p: p.stem)
def any_backend(request):
    return load_backend(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
