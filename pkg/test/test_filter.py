import numpy as np
import pytest

from SPyShift import Filter
from SPyShift.errors import DomainError, InconsistencyError


def test_apply_filter_examples():
    assert Filter.apply_filter(Filter.Tikhonov(), 1.0, 1.0) == pytest.approx(0.5)
    cutoff = Filter.SpectralCutoff()
    assert Filter.apply_filter(cutoff, 0.5, 0.25) == 0.0
    assert Filter.apply_filter(cutoff, 0.5, 1.0) == 1.0
    assert Filter.apply_filter(Filter.Landweber(t=3), 1 / 3.0, 0.5) == pytest.approx(1.75)


def test_apply_filter_errors():
    with pytest.raises(DomainError):
        Filter.Tikhonov().apply(0.1, 1.5)
    with pytest.raises(DomainError):
        Filter.Tikhonov().apply(0.0, 0.5)
    with pytest.raises(InconsistencyError):
        Filter.Landweber(t=3).apply(0.5, 0.5)


def test_landweber_matches_the_partial_sum():
    t = 7
    u = np.linspace(0, 1, 1000)
    direct = sum((1 - u) ** i for i in range(t))
    np.testing.assert_allclose(Filter.Landweber(t=t).apply(1.0 / t, u), direct, atol=1e-10)


def test_landweber_rounds_lambda():
    f = Filter.Landweber.fromLambda(0.3)
    assert f.t == 3
    assert f.effectiveLambda == pytest.approx(1 / 3.0)


def test_residual_identities():
    u = np.linspace(0, 1, 1000)
    lam = 0.1
    np.testing.assert_allclose(Filter.Tikhonov().residual(lam, u), lam / (lam + u), atol=1e-12)
    residual = Filter.SpectralCutoff().residual(lam, u)
    np.testing.assert_array_equal(residual, np.where(u >= lam, 0.0, 1.0))


def test_filter_constants():
    b, q, table = Filter.filter_constants(Filter.Tikhonov())
    assert (b, q) == (1.0, 1.0)
    assert table == {0.5: 1.0, 1.0: 1.0}
    b, q, table = Filter.filter_constants(Filter.SpectralCutoff(), nus=[2.0])
    assert q == np.inf and table[2.0] == 1.0

    t = 10
    u = np.linspace(0, 1, 100001)
    gridsup = np.max((1 - u) ** t * u / 0.1)
    gamma = Filter.Landweber(t=t).gamma(1.0)
    assert gamma >= gridsup * (1 - 1e-12)
    assert gamma == pytest.approx(gridsup, rel=1e-6)


def test_product_is_nonnegative_and_bounded():
    u = np.linspace(0, 1, 1000)
    for f, lam in [(Filter.Tikhonov(), 0.01), (Filter.SpectralCutoff(), 0.01), (Filter.Landweber(t=100), 0.01)]:
        product = u * f.apply(lam, u)
        assert np.all(product >= 0)
        assert np.all(product <= f.b * (1 + 1e-9))


def test_verify_filter_conditions():
    u = np.linspace(0, 1, 1000)
    assert Filter.verify_filter_conditions(Filter.Tikhonov(), [0.01, 0.1, 1], u, [1])['passed']
    assert Filter.verify_filter_conditions(Filter.SpectralCutoff(), [0.01, 0.1, 1], u, [0.5, 1, 2, 3])['passed']
    report = Filter.verify_filter_conditions(Filter.Tikhonov(), [0.01, 0.1, 1], u, [1, 2])
    assert report['passed']
    assert report['excluded'] == [2.0]
    assert report['notes']


def test_verify_filter_conditions_on_a_fine_grid():
    lambdas = np.logspace(-3, 0, 1000)
    u = np.linspace(0, 1, 1000)
    for f in [Filter.Tikhonov(), Filter.SpectralCutoff(), Filter.Landweber(t=1)]:
        assert Filter.verify_filter_conditions(f, lambdas, u, Filter.default_nus)['passed']


def test_verify_filter_conditions_domain():
    with pytest.raises(DomainError):
        Filter.verify_filter_conditions(Filter.Tikhonov(), [0.1], [0.5, 1.5], [1])


def test_cutoff_residual_is_exact_on_the_grid():
    u = np.linspace(0, 1, 1001)
    lambdas = u[1::50]
    cutoff = Filter.SpectralCutoff()
    for lam in lambdas:
        residual = cutoff.residual(lam, u)
        assert set(np.unique(residual)) <= {0.0, 1.0}
        assert cutoff.residual(lam, lam) == 0.0
    report = Filter.verify_filter_conditions(cutoff, lambdas, u, [0.5, 1, 2])
    for nu, ratios in report['residual'].items():
        assert max(ratios) <= 1.0
