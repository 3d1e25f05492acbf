import numpy as np
import pytest

from dyndisc.gaussian import CovarianceMatrix


def random_passive_symplectic(m, rng):
    """Orthogonal symplectic from a Haar-ish random m x m unitary."""
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
    S = np.zeros((2 * m, 2 * m))
    X, Y = q.real, q.imag
    for a in range(m):
        for b in range(m):
            S[2 * a, 2 * b] = X[a, b]
            S[2 * a, 2 * b + 1] = -Y[a, b]
            S[2 * a + 1, 2 * b] = Y[a, b]
            S[2 * a + 1, 2 * b + 1] = X[a, b]
    return S


def random_cm(m, rng, max_squeeze=0.8, max_nbar=2.0, pure=False):
    """Random valid covariance matrix: passive * squeeze * passive on thermals."""
    r = rng.uniform(-max_squeeze, max_squeeze, size=m)
    squeeze = np.diag(np.ravel([[np.exp(-x), np.exp(x)] for x in r]))
    S = random_passive_symplectic(m, rng) @ squeeze @ random_passive_symplectic(m, rng)
    nbar = np.zeros(m) if pure else rng.uniform(0.05, max_nbar, size=m)
    D = np.diag(np.ravel([[n + 0.5, n + 0.5] for n in nbar]))
    return CovarianceMatrix(S @ D @ S.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
