import numpy as np
import pytest

from blockspec.blocks import standard_library
from blockspec.capacitance import Tridiagonal


def charpoly_eigenvalues(m: Tridiagonal) -> np.ndarray:
    """Independent eigenvalue oracle for small matrices.

    Characteristic polynomials of leading principal minors obey the
    three-term recurrence p_k(x) = (x - d_k) p_{k-1}(x) - e_{k-1}^2 p_{k-2}(x);
    the eigenvalues are the roots of p_n. Only trustworthy for small n.
    """
    d, e = m.diag, m.offdiag
    p_prev = np.array([1.0])
    p = np.array([1.0, -d[0]])
    for k in range(1, m.n):
        term1 = np.polymul([1.0, -d[k]], p)
        term2 = e[k - 1] ** 2 * p_prev
        p_prev, p = p, np.polysub(term1, np.concatenate([np.zeros(2), term2]))
    roots = np.roots(p)
    assert np.abs(roots.imag).max() < 1e-8
    return np.sort(roots.real)


def dense_eigenvalues(m: Tridiagonal) -> np.ndarray:
    return np.linalg.eigvalsh(m.dense())


def random_tridiagonal(rng, n: int, scale: float = 1.0) -> Tridiagonal:
    return Tridiagonal(
        scale * rng.uniform(-2.0, 2.0, n), scale * rng.uniform(-2.0, 2.0, n - 1)
    )


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@pytest.fixture
def std_library():
    return standard_library()
