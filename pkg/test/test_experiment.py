import os
import copy
import xml.etree.ElementTree

import numpy as np
import pytest

from SPyShift import Estimator, Experiment, Filter, Kernel, Problem, Shift
from SPyShift.defaults import inputs as default, saturation
from SPyShift.errors import ContractViolation, ConfigurationError


def small(**experiment):
    inputs = copy.deepcopy(default)
    inputs['problem'].update(m=32, seed=5)
    inputs['experiment'].update(n_grid=[64, 128], trials=2)
    inputs['experiment'].update(experiment)
    return inputs


def exactEstimator(problem):
    """an estimator whose expansion is exactly f_rho (m odd, m equispaced anchors)"""
    m = problem.m
    anchors = np.arange(m) / float(m)
    phi = Kernel.basis(anchors, m)
    dual = np.linalg.solve(phi.T, problem.coefficients / problem.mu)
    return Estimator.SpectralEstimator(anchors, np.ones(m), dual * m, problem.kernel, 1.0, 0.1)


def test_excess_risk_exact_examples():
    p = Problem.make_problem(0.5, 1.0, 5, 0.0, target=[1.0])
    zero = Estimator.SpectralEstimator([0.5], [1.0], [0.0], p.kernel, 1.0, 0.1)
    assert Experiment.excess_risk_exact(zero, p) == pytest.approx(1.0)

    p = Problem.make_problem(0.5, 1.0, 5, 0.0)
    assert Experiment.excess_risk_exact(exactEstimator(p), p) == pytest.approx(0.0, abs=1e-20)

    other = Estimator.SpectralEstimator([0.5], [1.0], [0.0], Kernel.GaussianRBF(0.1), 1.0, 0.1)
    with pytest.raises(ContractViolation):
        Experiment.excess_risk_exact(other, p)


def test_excess_risk_mc_examples():
    p = Problem.make_problem(0.5, 1.0, 5, 0.0, target=[1.0])
    zero = Estimator.SpectralEstimator([0.5], [1.0], [0.0], p.kernel, 1.0, 0.1)
    assert Experiment.excess_risk_mc(zero, p, 100000, seed=1) == (1.0, 0.0)

    p = Problem.make_problem(0.5, 1.0, 5, 0.0)
    mean, se = Experiment.excess_risk_mc(exactEstimator(p), p, 1000, seed=1)
    assert mean == pytest.approx(0.0, abs=1e-20)


def test_excess_risk_mc_agrees_with_exact():
    p = Problem.make_problem(0.5, 1.0, 32, 0.5, shift=Shift.BoundedShift(a=0.5), seed=3)
    est = Estimator.fit(p.sample(100, 0), p.kernel, Filter.Tikhonov(), 0.05)
    exact = Experiment.excess_risk_exact(est, p)
    mean, se = Experiment.excess_risk_mc(est, p, 100000, seed=2)
    assert abs(mean - exact) < 4 * se

    small = Experiment.excess_risk_mc(est, p, 25000, seed=3)[1]
    large = Experiment.excess_risk_mc(est, p, 100000, seed=4)[1]
    assert large / small == pytest.approx(0.5, rel=0.2)


def test_effective_dimension_examples():
    assert Experiment.effective_dimension(Problem.make_problem(1.0, 1.0, 1, 0.1), 1.0) == pytest.approx(0.5)
    assert Experiment.effective_dimension(Problem.make_problem(1.0, 1.0, 2, 0.1), 0.5) == pytest.approx(7 / 6.0)
    p = Problem.make_problem(0.5, 1.0, 64, 0.1)
    assert Experiment.effective_dimension(p, 1e6) < 64 * 1e-5
    values = [Experiment.effective_dimension(p, lam) for lam in np.logspace(-4, 1, 20)]
    assert np.all(np.diff(values) < 0) and max(values) <= 64
    with pytest.raises(ContractViolation):
        Experiment.effective_dimension(p, 0.0)


def planted(exponent, scale=4.0, n_grid=(256, 512, 1024, 2048)):
    return [Experiment.RiskRecord(n, trial, 'unweighted', 'tikhonov', 0.1, np.nan,
                                  scale * n ** exponent, 'ok', 0) for n in n_grid for trial in range(3)]


def test_estimate_rate_examples():
    report = Experiment.estimate_rate(planted(-0.8))
    assert report.slope == pytest.approx(-0.8)
    assert report.stderr == pytest.approx(0.0, abs=1e-10)
    assert report.exponent == pytest.approx(-0.4)
    assert Experiment.estimate_rate(planted(0.0)).slope == pytest.approx(0.0, abs=1e-12)

    r, beta = 1.0, 0.5
    assert Experiment.estimate_rate(planted(-2 * r / (2 * r + beta), scale=0.3)).slope == pytest.approx(-0.8)

    with pytest.raises(ContractViolation):
        Experiment.estimate_rate(planted(-0.8, n_grid=(256, 512)))


def test_estimate_rate_uses_medians_and_skips_errors():
    records = planted(-1.0)
    records.append(Experiment.RiskRecord(256, 9, 'unweighted', 'tikhonov', 0.1, np.nan, 1e6, 'ok', 0))
    records.append(Experiment.RiskRecord(256, 10, 'unweighted', 'tikhonov', 0.1, np.nan, 1e6, 'ok', 0))
    records.append(Experiment.RiskRecord(512, 11, 'unweighted', 'tikhonov', np.nan, np.nan, np.nan,
                                         'error: NumericError: boom', 0))
    assert Experiment.estimate_rate(records).slope < -0.5


def test_run_experiment_cardinality_and_determinism(tmpdir):
    records = Experiment.run_experiment(small(), jobs=1)
    assert len(records) == 4
    assert all(r.status == 'ok' for r in records)
    assert all(r.risk >= 0 for r in records)
    assert len(set(Experiment.recordKey(r) for r in records)) == 4

    one, two = os.path.join(str(tmpdir), 'one.csv'), os.path.join(str(tmpdir), 'two.csv')
    Experiment.write_results(records, one)
    Experiment.write_results(Experiment.run_experiment(small(), jobs=2), two)
    with open(one, 'rb') as f, open(two, 'rb') as g:
        assert f.read() == g.read()


def test_results_round_trip(tmpdir):
    records = Experiment.run_experiment(small(scheme=['normalized', 'clipped'], theorem='thm3'), jobs=1)
    path = os.path.join(str(tmpdir), 'results.csv')
    Experiment.write_results(records, path)
    with open(path) as f:
        assert f.readline().strip() == 'n,trial,scheme,filter,lambda,D_n,risk,status,wall_ms'
    back = Experiment.read_results(path)
    assert len(back) == len(records)
    for a, b in zip(back, records):
        assert (a.n, a.trial, a.scheme, a.filter, a.status) == (b.n, b.trial, b.scheme, b.filter, b.status)
        assert a.risk == b.risk
        assert np.isnan(a.D_n) == (a.scheme != 'clipped')


def test_schemes_collapse_without_shift():
    inputs = small(scheme=['unweighted', 'normalized'])
    inputs['shift']['family'] = 'none'
    records = Experiment.run_experiment(inputs, jobs=1)
    unweighted = [r.risk for r in records if r.scheme == 'unweighted']
    normalized = [r.risk for r in records if r.scheme == 'normalized']
    np.testing.assert_allclose(unweighted, normalized, atol=1e-12)


def test_saturation_schemes_share_a_schedule():
    e = Experiment.Experiment(copy.deepcopy(saturation))
    for n in e.n_grid:
        normalized, clipped = e.setup(n, 'normalized'), e.setup(n, 'clipped')
        assert normalized[0] == clipped[0]
        assert np.isnan(normalized[3]) and clipped[3] > 0

def test_landweber_sweeps_round_their_lambdas():
    inputs = small()
    inputs['filter']['kind'] = 'landweber'
    records = Experiment.run_experiment(inputs, jobs=1)
    for r in records:
        t = int(r.filter[len('landweber('):-1])
        assert r.lam == 1.0 / t
        assert r.status == 'ok'


def test_failing_cells_become_error_rows():
    inputs = small(theorem='thm1')
    inputs['shift']['alpha'] = 0.5
    records = Experiment.run_experiment(inputs, jobs=1)
    assert len(records) == 4
    assert all(r.status.startswith('error: ContractViolation') for r in records)
    assert all(np.isnan(r.risk) for r in records)


def test_inputs_round_trip(tmpdir):
    path = os.path.join(str(tmpdir), 'inputs.json')
    inputs = Experiment.checkInputs(small())
    Experiment.save_inputs(inputs, path)
    assert Experiment.load_inputs(path) == inputs


def test_inputs_are_strict(tmpdir):
    inputs = small()
    inputs['problem']['betta'] = 0.5
    with pytest.raises(ConfigurationError):
        Experiment.checkInputs(inputs)
    with pytest.raises(ConfigurationError):
        Experiment.checkInputs(small(scheme='sometimes'))
    with pytest.raises(ConfigurationError):
        Experiment.checkInputs(small(n_grid=[128, 64]))
    with pytest.raises(ConfigurationError):
        Experiment.checkInputs(small(trials=0))
    with pytest.raises(ConfigurationError):
        Experiment.checkInputs(dict(camera={}))


def test_missing_keywords_are_filled():
    filled = Experiment.checkInputs(dict(problem=dict(r=2.0)))
    assert filled['problem']['r'] == 2.0
    assert filled['problem']['beta'] == default['problem']['beta']
    assert filled['experiment'] == default['experiment']


def test_seed_override(monkeypatch):
    monkeypatch.setenv('SPECTRAL_SHIFT_SEED', '17')
    assert Experiment.Experiment(small()).problem.seed == 17
    monkeypatch.delenv('SPECTRAL_SHIFT_SEED')
    assert Experiment.Experiment(small()).problem.seed == 5


def test_plot_rates(tmpdir):
    records = planted(-0.8) + [r._replace(scheme='clipped', risk=2 * r.risk) for r in planted(-0.7)]
    path = Experiment.plot_rates(records, os.path.join(str(tmpdir), 'rates.svg'), exponent=-0.4)
    root = xml.etree.ElementTree.parse(path).getroot()
    ids = [e.get('id') for e in root.iter() if e.get('id', '').startswith('rate-')]
    assert sorted(ids) == ['rate-clipped', 'rate-theory', 'rate-unweighted']
