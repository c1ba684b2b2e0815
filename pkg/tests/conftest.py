import functools
import itertools

import numpy as np
import pytest

from contextuality.geometry import (
    build_doily,
    build_mermin_square,
    build_quadric,
    build_symplectic_space,
    enumerate_quadrics,
    enumerate_subgeometries,
)

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@functools.lru_cache(maxsize=None)
def matrix(label: str) -> np.ndarray:
    """Explicit Kronecker-product matrix of a Pauli string (independent oracle)."""
    return functools.reduce(np.kron, (SINGLE[c] for c in label))


def matrix_scalar(m: np.ndarray):
    """Return s if m == s * I, else None."""
    s = m[0, 0]
    if np.allclose(m, s * np.eye(m.shape[0])):
        return s
    return None


def all_labels(n):
    return ["".join(t) for t in itertools.product("IXYZ", repeat=n)]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def square():
    return build_mermin_square()


@pytest.fixture(scope="session")
def doily():
    return build_doily()


@pytest.fixture(scope="session")
def w52():
    return build_symplectic_space(3)


@pytest.fixture(scope="session")
def elliptic(w52):
    return build_quadric("YYY", w52)


@pytest.fixture(scope="session")
def hyperbolic(w52):
    return build_quadric("IXI", w52)


@pytest.fixture(scope="session")
def quadrics(w52):
    return enumerate_quadrics(w52)


@pytest.fixture(scope="session")
def w52_squares(w52):
    return enumerate_subgeometries(w52, "square")


@pytest.fixture(scope="session")
def w52_doilies(w52):
    return enumerate_subgeometries(w52, "doily")
