"""Random instance generators shared by the test modules."""
import numpy as np
import pytest

from commsim.bipartite import BipartiteOperator
from commsim.matcore import schmidt_decompose


def random_unitary(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_isometry(rng, rows, cols):
    return random_unitary(rng, rows)[:, :cols]


def random_measurement_element(rng, dim_a, dim_b):
    """Random PSD operator with eigenvalues uniform in [0, 1]."""
    u = random_unitary(rng, dim_a * dim_b)
    lam = rng.uniform(0, 1, dim_a * dim_b)
    return BipartiteOperator(dim_a, dim_b, (u * lam) @ u.conj().T)


def random_state(rng, dim_a, dim_b):
    v = rng.standard_normal(dim_a * dim_b) + 1j * rng.standard_normal(dim_a * dim_b)
    return schmidt_decompose(v / np.linalg.norm(v), dim_a, dim_b)


def random_unit(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_matrix(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance reporting ---------------------------------------------------

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def record(number, title, ok, detail=""):
        _ACCEPTANCE_LINES.append((number, f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: "
                                          f"{title}" + (f" -- {detail}" if detail else "")))
        assert ok, f"criterion {number} failed: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
