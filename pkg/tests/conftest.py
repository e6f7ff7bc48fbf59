import numpy as np
import pytest

from torusrot.dynamics import SkewShear, Translation, TwoWave
from torusrot.projective import IntMatrix3

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


# psi(x) = (1 - cos 2 pi x) / 2, ranging over [0, 1]
BUMP = SkewShear(axis="vertical", omega=0.0, constant=0.5, cos=(-0.5,))

# third row (-1, 0, 1): the line x = 1 goes to infinity
L_WORKED = IntMatrix3(((1, 0, 0), (0, 1, 0), (-1, 0, 1)))
L_SHEAR = IntMatrix3(((1, 1, 0), (0, 1, 0), (0, 0, 1)))
L_CYCLE = IntMatrix3(((0, 0, 1), (1, 0, 0), (0, 1, 0)))

FAMILIES = {
    "translation": Translation(0.25, 0.5),
    "skew": BUMP,
    "twowave": TwoWave(0.3, 0.2, 0.1, 0.08),
}
