import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)


@pytest.fixture
def root_dir():
    return ROOT


@pytest.fixture
def clean_env(monkeypatch):
    """Environment without HEATKERNEL_* overrides."""
    for name in list(os.environ):
        if name.startswith("HEATKERNEL_"):
            monkeypatch.delenv(name, raising=False)
    return monkeypatch
