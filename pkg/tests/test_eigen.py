import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockspec.capacitance import Tridiagonal
from blockspec.eigen import (
    Spectrum,
    eigenvalues,
    eigenvector,
    eigenvectors,
    sturm_count,
)

from conftest import charpoly_eigenvalues, dense_eigenvalues, random_tridiagonal, rng_for


def test_eigenvalues_match_charpoly_oracle():
    rng = rng_for(10)
    for n in (2, 3, 5, 8):
        m = random_tridiagonal(rng, n)
        np.testing.assert_allclose(
            eigenvalues(m).eigenvalues, charpoly_eigenvalues(m), atol=1e-9
        )


def test_eigenvalues_match_dense_oracle_large():
    rng = rng_for(11)
    for n in (20, 97, 400):
        m = random_tridiagonal(rng, n)
        np.testing.assert_allclose(
            eigenvalues(m).eigenvalues, dense_eigenvalues(m), atol=1e-10
        )


def test_eigenvalues_scale_invariance():
    rng = rng_for(12)
    m = random_tridiagonal(rng, 30)
    big = Tridiagonal(1e8 * m.diag, 1e8 * m.offdiag)
    np.testing.assert_allclose(
        eigenvalues(big).eigenvalues, 1e8 * eigenvalues(m).eigenvalues, rtol=1e-10
    )


def test_degenerate_eigenvalues():
    m = Tridiagonal(np.array([2.0, 2.0, 2.0]), np.zeros(2))
    np.testing.assert_allclose(eigenvalues(m).eigenvalues, 2.0)


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_sturm_count_is_monotone(seed):
    rng = rng_for(seed)
    m = random_tridiagonal(rng, 12)
    grid = np.sort(rng.uniform(-6, 6, 8))
    counts = [sturm_count(m, x) for x in grid]
    assert counts == sorted(counts)
    assert sturm_count(m, 1e9) == 12
    assert sturm_count(m, -1e9) == 0


def test_sturm_count_brackets_dense_eigenvalues():
    rng = rng_for(13)
    m = random_tridiagonal(rng, 15)
    eigs = dense_eigenvalues(m)
    for k, lam in enumerate(eigs):
        assert sturm_count(m, lam - 1e-9) <= k
        assert sturm_count(m, lam + 1e-9) >= k + 1


def test_eigenvector_residuals():
    rng = rng_for(14)
    m = random_tridiagonal(rng, 60)
    sp = eigenvalues(m)
    scale = m.norm_inf()
    for lam in sp.eigenvalues[::7]:
        v = eigenvector(m, lam)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        assert np.linalg.norm(m.matvec(v) - lam * v) <= 1e-8 * scale


def test_eigenvectors_orthogonal_in_clusters():
    # two nearly-degenerate pairs force the cluster reorthogonalization
    d = np.array([1.0, 1.0 + 1e-13, 5.0, 5.0 + 1e-13])
    m = Tridiagonal(d, np.full(3, 1e-14))
    sp = eigenvalues(m)
    vs = eigenvectors(m, sp.eigenvalues)
    gram = vs.T @ vs
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-8)


def test_spectrum_distance_and_count():
    sp = Spectrum(np.array([0.0, 1.0, 2.5]), 1e-12)
    assert sp.distance(1.2) == pytest.approx(0.2)
    assert sp.distance(2.5) == 0.0
    assert sp.count_in(0.5, 2.6) == 2


def test_single_row_matrix():
    m = Tridiagonal(np.array([3.5]), np.zeros(0))
    np.testing.assert_allclose(eigenvalues(m).eigenvalues, [3.5])
