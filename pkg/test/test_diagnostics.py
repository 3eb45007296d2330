import numpy as np
import pytest

from SPyShift import Diagnostics, Kernel, Problem, Shift
from SPyShift.Estimator import Dataset
from SPyShift.errors import ContractViolation

rbf = Kernel.GaussianRBF(bandwidth=0.2)


def test_cordes_examples():
    identity = Diagnostics.OperatorPair(np.eye(3), np.eye(3))
    report = Diagnostics.check_cordes(identity, 0.5)
    assert report['passed']
    assert report['lhs'] == pytest.approx(1.0)

    prng = np.random.default_rng(10)
    pair = Diagnostics.OperatorPair(Diagnostics.randomPSD(prng, 4), Diagnostics.randomPSD(prng, 4))
    report = Diagnostics.check_cordes(pair, 1.0)
    assert report['passed']
    assert report['lhs'] == pytest.approx(report['rhs'])
    with pytest.raises(ContractViolation):
        Diagnostics.check_cordes(pair, 1.5)


def test_power_difference_examples():
    prng = np.random.default_rng(11)
    A = Diagnostics.randomPSD(prng, 5)
    report = Diagnostics.check_power_difference(Diagnostics.OperatorPair(A, A), 2.0)
    assert report['passed']
    assert report['lhs'] == pytest.approx(0.0, abs=1e-9)

    pair = Diagnostics.OperatorPair(A, Diagnostics.randomPSD(prng, 5))
    report = Diagnostics.check_power_difference(pair, 1.0)
    assert report['passed']
    assert report['lhs'] == pytest.approx(report['rhs'])
    with pytest.raises(ContractViolation):
        Diagnostics.check_power_difference(pair, 0.5)
    with pytest.raises(ContractViolation):
        Diagnostics.check_power_difference(Diagnostics.OperatorPair(A, A, cap=1e-3), 2.0)


def test_operator_pairs_must_be_psd():
    with pytest.raises(ContractViolation):
        Diagnostics.OperatorPair(np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(ContractViolation):
        Diagnostics.OperatorPair(np.eye(2), np.eye(3))
    with pytest.raises(ContractViolation):
        Diagnostics.OperatorPair([[1.0, 2.0], [0.0, 1.0]], np.eye(2))


def test_normalization_gap_examples():
    data = Dataset([0.2, 0.5, 0.9], [0.0, 0.0, 0.0])
    report = Diagnostics.check_normalization_gap(data, rbf)
    assert report['passed']
    assert report['lhs'] == pytest.approx(0.0, abs=1e-12)

    data = Dataset([0.2, 0.7], [0.0, 0.0], [0.5, 1.5])
    report = Diagnostics.check_normalization_gap(data, rbf)
    assert report['passed']
    assert report['lhs'] == pytest.approx(0.0, abs=1e-12)


def test_checks_ignore_the_sample_order():
    prng = np.random.default_rng(12)
    shift = Shift.LogShift()
    x = shift.sample(20, prng)
    order = prng.permutation(20)
    one = Dataset(x, np.zeros(20), shift.density_ratio(x))
    two = Dataset(x[order], np.zeros(20), shift.density_ratio(x)[order])
    a, b = Diagnostics.check_normalization_gap(one, rbf), Diagnostics.check_normalization_gap(two, rbf)
    assert a['lhs'] == pytest.approx(b['lhs'], rel=1e-9, abs=1e-12)
    a, b = Diagnostics.check_operator_norm(one, rbf, 2.0), Diagnostics.check_operator_norm(two, rbf, 2.0)
    assert a['clipped']['lhs'] == pytest.approx(b['clipped']['lhs'], rel=1e-9)
    assert a['normalized']['lhs'] == pytest.approx(b['normalized']['lhs'], rel=1e-9)


def test_operator_norm_bounds():
    data = Dataset([0.1, 0.4], [0.0, 0.0], [100.0, 0.5])
    report = Diagnostics.check_operator_norm(data, rbf, 2.0)
    assert report['passed']
    assert report['clipped']['rhs'] == pytest.approx(2.0)
    assert report['normalized']['rhs'] == pytest.approx(2.0)


lambdas = [0.01, 0.1, 1.0]


def test_effdim_clipping_without_shift_is_unchanged():
    problem = Problem.make_problem(0.5, 1.0, 16, 0.0)
    report = Diagnostics.check_effdim_clipping(problem, Shift.NoShift(), 2.0, lambdas)
    assert report['passed']
    np.testing.assert_allclose(report['clipped'], report['unclipped'], rtol=1e-8)


def test_effdim_clipping_of_a_bounded_ratio_below_the_threshold():
    shift = Shift.BoundedShift(a=0.5)
    problem = Problem.make_problem(0.5, 1.0, 16, 0.0, shift=shift)
    report = Diagnostics.check_effdim_clipping(problem, shift, 2.0, lambdas)
    np.testing.assert_allclose(report['clipped'], report['unclipped'], rtol=1e-8)


def test_effdim_clipping_is_strict_and_monotone_for_an_unbounded_ratio():
    shift = Shift.LogShift()
    problem = Problem.make_problem(0.5, 1.0, 16, 0.0, shift=shift)
    report = Diagnostics.check_effdim_clipping(problem, shift, 2.0, lambdas)
    assert report['passed']
    assert np.all(np.array(report['clipped']) < np.array(report['unclipped']))

    values = [Diagnostics.check_effdim_clipping(problem, shift, D_n, lambdas)['clipped'] for D_n in (1.5, 2.0, 4.0)]
    assert np.all(np.diff(values, axis=0) >= -1e-12)

    with pytest.raises(ContractViolation):
        Diagnostics.check_effdim_clipping(problem, shift, 1.0, lambdas)
    with pytest.raises(ContractViolation):
        Diagnostics.check_effdim_clipping(problem, shift, 2.0, [0.0])


@pytest.mark.parametrize('name', sorted(Diagnostics.suites))
def test_suites_pass(name):
    rows = Diagnostics.run_diagnostics([name])
    assert len(rows) >= 200
    failed = [r for r in rows if not r['passed']]
    assert failed == []
    assert all(r['suite'] for r in rows)


def test_unknown_suite():
    with pytest.raises(ContractViolation):
        Diagnostics.run_diagnostics(['triangle'])
