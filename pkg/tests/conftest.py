import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def fd_gradient(f, x0, h=1e-5, idx=None):
    """Central finite differences of a scalar function of a flat vector."""
    x0 = np.asarray(x0, dtype=np.float64)
    idx = range(x0.size) if idx is None else idx
    g = np.zeros(x0.size)
    for i in idx:
        xp = x0.copy()
        xp[i] += h
        xm = x0.copy()
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def assert_grad_close(analytic, numeric, rtol=1e-4, afloor=1e-7, idx=None):
    idx = range(len(analytic)) if idx is None else idx
    for i in idx:
        tol = rtol * max(abs(numeric[i]), afloor)
        assert abs(analytic[i] - numeric[i]) <= tol, (
            f"coord {i}: analytic {analytic[i]} vs fd {numeric[i]}")
