import numpy as np
import pytest

ACCEPTANCE_RESULTS = []


def record_criterion(number, name, ok, detail=""):
    ACCEPTANCE_RESULTS.append((number, name, bool(ok), detail))
    print(f"criterion {number} [{name}]: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{number}. {name}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_sym(rng, n=None, low=-1.0, high=1.0):
    shape = (3,) if n is None else (n, 3)
    return rng.uniform(low, high, shape)


def random_rotation_pair(rng):
    """Two packed matrices sharing an eigenbasis."""
    phi = rng.uniform(-np.pi / 2, np.pi / 2)
    c, s = np.cos(phi), np.sin(phi)
    out = []
    for _ in range(2):
        lam, mu = np.sort(rng.uniform(-1, 1, 2))[::-1]
        out.append([mu + (lam - mu) * c * c, (lam - mu) * c * s, mu + (lam - mu) * s * s])
    return np.array(out)
