import numpy as np
import pytest

from bergman_lab import measures as ms
from bergman_lab import model as md
from bergman_lab import quadrature as qd
from bergman_lab import weights as wt

THREE_ATOMS = np.array([[0.8, 0.0], [0.0, 0.8j], [-0.5, -0.6]])


def three_atom_spec():
    mu = ms.AtomicBall(THREE_ATOMS, [1.0, 1.0, 1.0])
    return wt.PotentialHarmonic(mu, 0.0, 1.0, ms.UniformBoundary(1.0, 2))


@pytest.fixture(scope="session")
def rule2():
    return qd.ProductRule(2, 64, 4096)


@pytest.fixture(scope="session")
def unit_model(rule2):
    return md.build_model(wt.unit_weight(2), 12, rule2)


@pytest.fixture(scope="session")
def radial_model(rule2):
    return md.build_model(wt.ReferenceRadial(1.0), 12, rule2)


@pytest.fixture(scope="session")
def atom_model(rule2):
    return md.build_model(three_atom_spec(), 12, rule2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, shown after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
