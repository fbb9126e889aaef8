import numpy as np
import pytest

from coherent_nscs.laser import LaserPulse
from coherent_nscs.wavepackets import GaussianPacket


@pytest.fixture(scope="session")
def fig2_pulse():
    return LaserPulse(1.55, 5.0)


@pytest.fixture(scope="session")
def fig2_packets():
    p1 = GaussianPacket.from_widths((0.0, 0.0, -1.0e7), 31.0, 0.62, spin=1)
    p2 = p1.with_(shift=(1e-2, 1e-2, 1e-3), spin=-1)
    return p1, p2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
