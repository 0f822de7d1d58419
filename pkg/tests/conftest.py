import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qlspin.protocol import ProtocolConfig  # noqa: E402


@pytest.fixture
def small_cfg():
    """Ideal protocol configuration on a small Fock space (fast)."""
    return ProtocolConfig(n_max=4, photon_sampling=False)


@pytest.fixture
def cfg():
    return ProtocolConfig(photon_sampling=False)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
