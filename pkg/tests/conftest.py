import numpy as np
import pytest

ACCEPTANCE_LINES = []


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_contraction(rng, d, norm):
    A = crandn(rng, d, d)
    return A * (norm / np.linalg.norm(A, 2))


def random_stable(rng, d, radius):
    A = crandn(rng, d, d)
    return A * (radius / np.max(np.abs(np.linalg.eigvals(A))))


def random_unitary(rng, d):
    Q, R = np.linalg.qr(crandn(rng, d, d))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
