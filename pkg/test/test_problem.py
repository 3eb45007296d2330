import numpy as np
import pytest

from SPyShift import Estimator, Filter, Kernel, Problem, Shift
from SPyShift.Experiment import excess_risk_exact
from SPyShift.errors import ContractViolation


def test_make_problem_examples():
    np.testing.assert_allclose(Problem.make_problem(1.0, 1.0, 3, 0.1).mu, [1, 0.5, 1 / 3.0])
    np.testing.assert_allclose(Problem.make_problem(0.5, 1.0, 2, 0.1).mu, [1, 0.25])
    single = Problem.make_problem(0.5, 1.0, 8, 0.0, target=[1.0])
    np.testing.assert_allclose(single.f_rho(np.linspace(0, 1, 5)), np.ones(5))
    assert isinstance(single.kernel, Kernel.TruncatedBasis)


def test_make_problem_errors():
    for kw in [dict(beta=0), dict(beta=1.5), dict(r=0.25), dict(m=0), dict(noise=-1)]:
        args = dict(beta=0.5, r=1.0, m=4, noise_bound=0.1)
        args.update({('noise_bound' if k == 'noise' else k): v for k, v in kw.items()})
        with pytest.raises(ContractViolation):
            Problem.make_problem(**args)


def test_target_coefficients():
    a = Problem.target_coefficients(4)
    np.testing.assert_allclose(a, [1, -2 ** -0.51, 3 ** -0.51, -4 ** -0.51])
    p = Problem.make_problem(0.5, 1.0, 16, 0.1)
    assert p.u_rho_norm == pytest.approx(np.sqrt(np.sum(Problem.target_coefficients(16) ** 2)))


def test_f_rho_eval_examples():
    single = Problem.make_problem(0.5, 2.0, 4, 0.0, target=[1.0])
    assert Problem.f_rho_eval(single, 0.37) == pytest.approx(1.0)

    two = Problem.make_problem(0.5, 1.0, 2, 0.0)
    mu, a = two.mu, two.a
    assert Problem.f_rho_eval(two, 0.0) == pytest.approx(mu[0] * a[0] + mu[1] * a[1] * np.sqrt(2))

    p = Problem.make_problem(0.5, 1.0, 32, 0.0)
    integral = Shift.midpoint(lambda x: p.f_rho(x) * Kernel.basis(x, 1)[:, 0])
    assert integral == pytest.approx(p.mu[0] * p.a[0], abs=1e-6)


def test_basis_is_orthonormal():
    m, panels = 12, 100000
    gram = np.zeros((m, m))
    for start in range(0, panels, 10000):
        x = (np.arange(start, start + 10000) + 0.5) / panels
        phi = Kernel.basis(x, m)
        gram += phi.T.dot(phi)
    np.testing.assert_allclose(gram / panels, np.eye(m), atol=1e-6)


def test_sample_train():
    single = Problem.make_problem(0.5, 1.0, 4, 0.0, target=[1.0])
    data = Problem.sample_train(single, 100, 0)
    np.testing.assert_array_equal(data.y, np.ones(100))
    np.testing.assert_array_equal(data.raw_weights, np.ones(100))

    p = Problem.make_problem(0.5, 1.0, 16, 0.3, shift=Shift.LogShift(), seed=11)
    a, b = Problem.sample_train(p, 200, 3), Problem.sample_train(p, 200, 3)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)
    assert not np.array_equal(a.x, Problem.sample_train(p, 200, 4).x)
    assert np.all(np.abs(a.y - p.f_rho(a.x)) <= 0.3)

    w = Problem.sample_train(p, 10000, 0).raw_weights
    assert abs(np.mean(w) - 1) < 5 * np.std(w) / np.sqrt(len(w))


def test_lambda_schedule_examples():
    assert Problem.lambda_schedule('thm4', 1024, 1.0, 1.0) == pytest.approx(0.0992125657480125)
    assert Problem.lambda_schedule('thm1', 1000, 1.0, 1.0, alpha=1.0) == pytest.approx(0.1)
    assert Problem.lambda_schedule('thm3', 4096, 1.0, 0.5, epsilon=0.1) == pytest.approx(0.08246924442330589)
    assert Problem.lambda_schedule('cor1', 1000, 1.0, 0.5) == pytest.approx(0.1)
    with pytest.raises(ContractViolation):
        Problem.lambda_schedule('thm1', 1000, 1.0, 0.5, alpha=0.5)
    with pytest.raises(ContractViolation):
        Problem.lambda_schedule('thm3', 1000, 1.0, 0.5, epsilon=0.5)
    assert Problem.landweber_steps(0.0992125657480125) == (10, 0.1)


def test_theoretical_exponents():
    assert Problem.theoretical_exponent('thm4', 1.0, 0.5) == pytest.approx(-0.4)
    assert Problem.theoretical_exponent('thm3', 1.0, 0.5, epsilon=0.05) == pytest.approx(-0.35)
    assert Problem.theoretical_exponent('thm1', 2.0, 1.0, alpha=1.0) == pytest.approx(-0.375)
    assert Problem.theoretical_exponent('cor1', 2.0, 1.0) == pytest.approx(-0.375)


def test_effective_dimension_realizes_the_capacity():
    p = Problem.make_problem(0.5, 1.0, 512, 0.1)
    lambdas, values = p.capacity()
    assert np.all(np.isfinite(values))
    assert np.max(values) <= 2 * p.effective_dimension(1e-2) * 1e-2 ** 0.5

    # for beta = 1 the capacity constant is the trace of L_K
    p = Problem.make_problem(1.0, 1.0, 512, 0.1)
    lambdas, values = p.capacity()
    assert np.max(values) <= np.sum(p.mu)
    assert np.max(values[lambdas <= 1e-2]) <= 2 * p.effective_dimension(1e-2) * 1e-2


def test_noiseless_fit_is_consistent():
    p = Problem.make_problem(0.5, 1.0, 64, 0.0, target=[1.0])
    data = p.sample(2048, 0)
    est = Estimator.fit(data, p.kernel, Filter.Tikhonov(), 1e-3)
    assert excess_risk_exact(est, p) < 1e-2
