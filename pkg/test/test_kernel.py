import numpy as np
import pytest

from SPyShift import Kernel
from SPyShift.errors import DomainError, ContractViolation


def test_eval_kernel_examples():
    assert Kernel.eval_kernel(Kernel.GaussianRBF(bandwidth=1.0), 0.3, 0.3) == pytest.approx(1.0)
    assert Kernel.eval_kernel(Kernel.TruncatedBasis([1.0]), 0.1, 0.9) == pytest.approx(1.0)
    assert Kernel.eval_kernel(Kernel.TruncatedBasis([1.0, 0.5]), 0.0, 0.0) == pytest.approx(2.0)


def test_eval_kernel_rejects_bad_points():
    k = Kernel.GaussianRBF()
    with pytest.raises(DomainError):
        k.evaluate(np.nan, 0.5)
    with pytest.raises(DomainError):
        k.evaluate(1.5, 0.5)


def test_gram_matrix_examples():
    np.testing.assert_allclose(Kernel.gram_matrix(Kernel.GaussianRBF(1.0), [0.5]).entries, [[1.0]])
    np.testing.assert_allclose(Kernel.gram_matrix(Kernel.TruncatedBasis([1.0]), [0.1, 0.4, 0.8]).entries,
                               np.ones((3, 3)))
    e = np.exp(-0.5)
    np.testing.assert_allclose(Kernel.gram_matrix(Kernel.GaussianRBF(0.1), [0.0, 0.1]).entries,
                               [[1, e], [e, 1]], rtol=1e-12)
    with pytest.raises(DomainError):
        Kernel.gram_matrix(Kernel.GaussianRBF(), [])


def test_kappa_examples():
    assert Kernel.kappa(Kernel.GaussianRBF(0.3)) == 1.0
    assert Kernel.kappa(Kernel.TruncatedBasis([1.0])) == pytest.approx(1.0)
    assert Kernel.kappa(Kernel.TruncatedBasis([1.0, 0.25])) == pytest.approx(np.sqrt(1.5), rel=1e-9)


def test_kappa_bounds_the_diagonal():
    k = Kernel.TruncatedBasis(np.arange(1, 65) ** -2.0)
    grid = np.linspace(0, 1, 10000)
    assert np.all(k.diagonal(grid) <= k.kappa ** 2 + 1e-9)
    assert k.kappa <= k.bound * (1 + 1e-12)


def test_gram_matrices_are_psd():
    prng = np.random.default_rng(42)
    for k in [Kernel.GaussianRBF(0.05), Kernel.GaussianRBF(0.5), Kernel.TruncatedBasis(np.arange(1, 33) ** -1.0)]:
        for i in range(100):
            g = k.gram(prng.random(int(prng.integers(1, 51))))
            assert g.min_eigenvalue() >= -1e-10 * np.max(np.abs(g.entries))
            np.testing.assert_array_equal(g.entries, g.entries.T)


def test_truncated_gram_is_a_feature_product():
    mu = np.arange(1, 11) ** -2.0
    k = Kernel.TruncatedBasis(mu)
    x = np.random.default_rng(1).random(20)
    phi = Kernel.basis(x, 10)
    np.testing.assert_allclose(k.gram(x).entries, phi.dot(np.diag(mu)).dot(phi.T), atol=1e-12)


def test_truncated_basis_checks_eigenvalues():
    with pytest.raises(ContractViolation):
        Kernel.TruncatedBasis([0.5, 1.0])
    with pytest.raises(ContractViolation):
        Kernel.TruncatedBasis([1.0, 0.0])
    with pytest.raises(ContractViolation):
        Kernel.GaussianRBF(bandwidth=-1)


def test_make_kernel_round_trip():
    k = Kernel.TruncatedBasis([1.0, 0.5, 0.25])
    assert Kernel.makeKernel(**k.inputs) == k
    assert Kernel.makeKernel(**Kernel.GaussianRBF(0.2).inputs) == Kernel.GaussianRBF(0.2)
