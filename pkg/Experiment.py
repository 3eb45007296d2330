"""Excess risks, sample-size sweeps, and empirical convergence rates.

An Experiment takes a dictionary of dictionaries of inputs (see defaults.py),
builds the synthetic problem, shift and filter it describes, and then fits
one estimator for every (n, trial, scheme) cell of the sweep, recording the
exact excess risk ||f - f_rho||**2 in L2(rho_te)."""
import os
import copy
import json
import time
import logging
import collections
import multiprocessing

import numpy as np
import scipy.stats
import astropy.io.ascii
import astropy.table

from . import Kernel
from . import Estimator
from . import Filter
from . import Problem
from . import Shift
from .debug import DebugDict
from .defaults import inputs as default
from .errors import SPyShiftError, ContractViolation, ConfigurationError, NumericError
from .settings import log_file_handler, seed_override, dirs

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# the columns of a results table, in order
columns = ('n', 'trial', 'scheme', 'filter', 'lambda', 'D_n', 'risk', 'status', 'wall_ms')

# one row of a results table
RiskRecord = collections.namedtuple('RiskRecord', ['n', 'trial', 'scheme', 'filter', 'lam', 'D_n',
                                                   'risk', 'status', 'wall_ms'])


def recordKey(record):
    return (record.n, record.trial, record.scheme, record.filter)


def excess_risk_exact(est, problem):
    """||f_est - f_rho||**2 in L2(rho_te), summed over basis coefficients.

    Both functions lie in the span of phi_1..phi_m, which are orthonormal in
    L2(Uniform[0,1]), so the sum is exact."""
    if not isinstance(est.kernel, Kernel.TruncatedBasis) or est.kernel != problem.kernel:
        raise ContractViolation('the estimator kernel {} is not the problem kernel {}'.format(
            est.kernel, problem.kernel))
    return float(np.sum((est.basisCoefficients() - problem.coefficients) ** 2))


def excess_risk_mc(est, problem, n_test, seed=0):
    """Monte-Carlo estimate (and its standard error) of the excess risk, with x ~ Uniform[0,1]."""
    if int(n_test) != n_test or n_test < 2:
        raise ContractViolation('n_test must be an integer >= 2, got {}'.format(n_test))
    x = np.random.default_rng(seed).random(int(n_test))
    squared = (est.predict(x) - problem.f_rho(x)) ** 2
    return float(np.mean(squared)), float(np.std(squared, ddof=1) / np.sqrt(n_test))


def effective_dimension(problem, lam):
    """N(lambda) = sum_k mu_k/(lambda + mu_k)."""
    return problem.effective_dimension(lam)


class RateReport(object):
    """The least-squares fit of log(median risk) against log(n).

    slope is on the squared-risk scale; exponent = slope/2 is the one to compare
    with the theorems, which bound ||f - f_rho|| rather than its square."""

    def __init__(self, n_grid, medians, slope, intercept, stderr, scheme=None):
        self.n_grid = [int(n) for n in n_grid]
        self.medians = [float(m) for m in medians]
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.stderr = float(stderr)
        self.scheme = scheme

    @property
    def exponent(self):
        return self.slope / 2.0

    @property
    def summary(self):
        return dict(scheme=self.scheme, n_grid=self.n_grid, medians=self.medians, slope=self.slope,
                    intercept=self.intercept, stderr=self.stderr, exponent=self.exponent)

    def __repr__(self):
        return '<RateReport({}: slope {:.4f} +/- {:.4f}, exponent {:.4f})>'.format(
            self.scheme, self.slope, self.stderr, self.exponent)


def medians(records, scheme=None):
    """{n: median risk} over the successful records (of one scheme, if given)."""
    risks = collections.defaultdict(list)
    for record in records:
        if scheme is not None and record.scheme != scheme:
            continue
        if record.status == 'ok' and np.isfinite(record.risk):
            risks[int(record.n)].append(record.risk)
    return {n: float(np.median(risks[n])) for n in sorted(risks)}


def estimate_rate(records, scheme=None):
    """Fit log(median risk) = slope log(n) + intercept across the n values."""
    records = list(records)
    if scheme is None:
        schemes = set(r.scheme for r in records if r.status == 'ok')
        if len(schemes) > 1:
            raise ContractViolation('records mix the schemes {}; pick one'.format(sorted(schemes)))
        scheme = schemes.pop() if schemes else None
    perN = medians(records, scheme)
    if len(perN) < 3:
        raise ContractViolation('a rate needs at least 3 distinct n with a successful trial, got {}'.format(
            sorted(perN)))
    n = np.array(list(perN.keys()), dtype=float)
    m = np.array(list(perN.values()))
    if np.any(m <= 0):
        raise NumericError('cannot take the log of a zero median risk')
    fit = scipy.stats.linregress(np.log(n), np.log(m))
    report = RateReport(n, m, fit.slope, fit.intercept, fit.stderr, scheme=scheme)
    logger.info('estimated {}'.format(report))
    return report


def estimate_rates(records):
    """A RateReport for each scheme in a set of records."""
    records = list(records)
    return {scheme: estimate_rate(records, scheme)
            for scheme in sorted(set(r.scheme for r in records if r.status == 'ok'))}


def write_results(records, path):
    """Write records to a CSV file (one header row, sorted by key)."""
    records = sorted(records, key=recordKey)
    rows = [[getattr(r, f) for f in RiskRecord._fields] for r in records]
    data = list(zip(*rows)) if rows else [[] for f in columns]
    table = astropy.table.Table(data=data, names=columns,
                                dtype=(int, int, str, str, float, float, float, str, int))
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(directory):
        os.makedirs(directory, exist_ok=True)
    table.write(path, format='ascii.csv', overwrite=True,
                formats={'lambda': '%.17g', 'D_n': '%.17g', 'risk': '%.17g'})
    logger.info('wrote {} records to {}'.format(len(records), path))


def read_results(path):
    """Read the records back from a results CSV."""
    table = astropy.io.ascii.read(path, format='csv', fill_values=[])
    missing = [c for c in columns if c not in table.colnames]
    if missing:
        raise ContractViolation('{} is missing the columns {}'.format(path, missing))
    records = []
    for row in table:
        records.append(RiskRecord(int(row['n']), int(row['trial']), str(row['scheme']), str(row['filter']),
                                  float(row['lambda']), float(row['D_n']), float(row['risk']),
                                  str(row['status']), int(row['wall_ms'])))
    return records


def plot_rates(records, path, exponent=None):
    """Draw log(median risk) against log(n), one line per scheme, into an SVG."""
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    records = list(records)
    plt.rcParams['svg.hashsalt'] = 'spyshift'
    fig = plt.figure('rates', figsize=(6, 4.5))
    plt.clf()
    ax = fig.gca()
    first = None
    for scheme in sorted(set(r.scheme for r in records)):
        perN = medians(records, scheme)
        if not perN:
            continue
        n, m = list(perN.keys()), list(perN.values())
        ax.loglog(n, m, marker='o', linewidth=1.5, alpha=0.8, label=scheme, gid='rate-{}'.format(scheme))
        first = first or (n[0], m[0])
    if exponent is not None and first is not None:
        n = np.array(sorted(set(int(r.n) for r in records)), dtype=float)
        ax.loglog(n, first[1] * (n / first[0]) ** (2 * exponent), linestyle='--', color='gray',
                  label='n^{:.3f}'.format(2 * exponent), gid='rate-theory')
    ax.set_xlabel('training sample size n')
    ax.set_ylabel('median excess risk')
    ax.legend(loc='upper right', fontsize=8)
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(directory):
        os.makedirs(directory, exist_ok=True)
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logger.info('saved rate plot to {}'.format(path))
    return path


def checkInputs(inputs):
    """Fill missing keywords from the defaults and check the values that need it."""
    from .documentation.input import documented_keywords, documented_choices

    checked = DebugDict(inputs, documented_keywords, documented_choices)
    filled = copy.deepcopy(default)
    for block in checked:
        filled[block].update(copy.deepcopy(checked[block]))

    grid = filled['experiment']['n_grid']
    if (not isinstance(grid, (list, tuple)) or len(grid) == 0
            or any(int(n) != n or n < 1 for n in grid) or any(b <= a for a, b in zip(grid[:-1], grid[1:]))):
        raise ConfigurationError('experiment.n_grid must be a strictly increasing list of positive integers, '
                                 'got {}'.format(grid))
    trials = filled['experiment']['trials']
    if int(trials) != trials or trials < 1:
        raise ConfigurationError('experiment.trials must be an integer >= 1, got {}'.format(trials))
    return filled


def load_inputs(path):
    """Read an experiment document (UTF-8 JSON), refusing unknown keys."""
    with open(path, encoding='utf-8') as f:
        try:
            inputs = json.load(f)
        except ValueError as e:
            raise ConfigurationError('{} is not valid JSON: {}'.format(path, e))
    if not isinstance(inputs, dict):
        raise ConfigurationError('{} must hold a dictionary of blocks'.format(path))
    return checkInputs(inputs)


def save_inputs(inputs, path):
    """Write an experiment document that load_inputs reads back unchanged."""
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(inputs, f, indent=2, sort_keys=True)
        f.write('\n')


class Experiment(object):
    """an experiment object handles a sweep over sample sizes and trials,
        using the same problem, the same shift, the same filter"""

    def __init__(self, inputs=default):
        """initialize a basic experiment object"""

        # store the (checked and filled) dictionary of dictionaries of inputs
        self.inputs = checkInputs(inputs)

        # print the inputs for this experiment
        logger.info("  creating a new experiment, with the following inputs:")
        for k in self.inputs.keys():
            logger.info('   {:>20s}'.format('inputs[{}] = '.format(k)))
            for l in self.inputs[k].keys():
                logger.info('     {:>30s}:{}'.format(l, self.inputs[k][l]))

        kw = self.inputs['experiment']
        self.theorem = kw['theorem'].lower()
        schemes = kw['scheme'] if isinstance(kw['scheme'], (list, tuple)) else [kw['scheme']]
        self.schemes = [s.lower() for s in schemes]
        self.n_grid = [int(n) for n in kw['n_grid']]
        self.trials = int(kw['trials'])
        self.epsilon = kw['epsilon']
        self.timing = bool(kw['timing'])

        self.createShift()
        self.createProblem()

    def createShift(self):
        logger.info('setting up the covariate shift for this Experiment.')
        self.shift = Shift.makeShift(**self.inputs['shift'])

    def createProblem(self):
        try:
            shift = self.shift
        except AttributeError:
            raise RuntimeError('createShift must be run before createProblem')
        kw = self.inputs['problem']
        self.problem = Problem.make_problem(kw['beta'], kw['r'], kw['m'], kw['noise'], shift=shift,
                                            seed=seed_override(kw['seed']))

    @property
    def cells(self):
        """every (n, trial, scheme) of the sweep"""
        return [(n, trial, scheme) for n in self.n_grid for trial in range(self.trials) for scheme in self.schemes]

    def setup(self, n, scheme):
        """The lambda, filter, weighting scheme and D_n for one sample size."""
        p, shift = self.problem, self.shift
        lam = Problem.lambda_schedule(self.theorem, n, p.r, p.beta, alpha=shift.alpha, epsilon=self.epsilon)
        kw = self.inputs['filter']
        if kw['kind'].lower() == 'landweber':
            t = kw.get('t')
            if t is None:
                t, lam = Problem.landweber_steps(lam)
            else:
                lam = 1.0 / t
            filter = Filter.Landweber(t=t)
        else:
            filter = Filter.makeFilter(**kw)
        D_n = np.nan
        if scheme == 'clipped':
            D_n = Shift.clipping_threshold(n, p.r, shift.alpha, self.epsilon, p.beta)
        return lam, filter, Shift.makeScheme(scheme, D_n=D_n if scheme == 'clipped' else None), D_n

    def run(self, cell):
        """Fit and score one cell, turning any failure into an error row."""
        n, trial, scheme = cell
        start = time.perf_counter()
        lam, D_n, filtercode = np.nan, np.nan, self.inputs['filter']['kind'].lower()
        try:
            lam, filter, weights, D_n = self.setup(n, scheme)
            filtercode = filter.code
            data = self.problem.sample(n, trial)
            est = Estimator.fit(data, self.problem.kernel, filter, lam, weights)
            risk, status = excess_risk_exact(est, self.problem), 'ok'
        except (SPyShiftError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            logger.warning('cell n={} trial={} {} failed: {}'.format(n, trial, scheme, e))
            risk, status = np.nan, 'error: {}: {}'.format(type(e).__name__, e)
        wall = int(round(1000 * (time.perf_counter() - start))) if self.timing else 0
        return RiskRecord(n, trial, scheme, filtercode, lam, D_n, risk, status, wall)

    def create(self, jobs=None):
        """Run every cell of the sweep, in parallel over jobs processes, and return sorted records."""
        jobs = jobs or os.cpu_count() or 1
        cells = self.cells
        # kappa is cached on the kernel, so compute it once before it is shipped to the workers
        self.problem.kernel.kappa
        logger.info('running {} cells on {} processes'.format(len(cells), jobs))
        if jobs > 1 and len(cells) > 1:
            with multiprocessing.Pool(processes=min(jobs, len(cells))) as pool:
                records = pool.map(self.run, cells)
        else:
            records = [self.run(cell) for cell in cells]
        records = sorted(records, key=recordKey)
        failed = sum(r.status != 'ok' for r in records)
        if failed:
            logger.warning('{} of {} cells failed'.format(failed, len(records)))
        return records

    @property
    def resultsPath(self):
        return self.inputs['experiment']['results'] or os.path.join(dirs['outputs'], 'results.csv')

    @property
    def plotPath(self):
        return self.inputs['experiment']['plot'] or os.path.join(dirs['plots'], 'rates.svg')

    @property
    def exponent(self):
        """the norm-scale exponent predicted for this experiment's schedule"""
        p = self.problem
        return Problem.theoretical_exponent(self.theorem, p.r, p.beta, alpha=self.shift.alpha,
                                            epsilon=self.epsilon)

    def __repr__(self):
        return '<Experiment({}, {}, {}, n={}, {} trials)>'.format(
            self.problem, self.theorem, self.schemes, self.n_grid, self.trials)


def run_experiment(config, jobs=None):
    """Run a sweep from an inputs dictionary (or the path of a JSON document)."""
    if isinstance(config, str):
        config = load_inputs(config)
    return Experiment(config).create(jobs=jobs)
