"""Deterministic operator inequalities used in the error analysis, checked on finite matrices.

Operators on H_K are realized as symmetric matrices that share their nonzero
spectrum: S_X^T W S_X as (1/n) K^(1/2) W K^(1/2) (or diag(s) K diag(s)/n), and
the clipped integral operator as a Gram matrix in the basis sqrt(mu_k) phi_k.
Each check returns a report dictionary with the two sides of the inequality
and whether it held; the *_suite functions run fixed-seed randomized batches."""
import logging

import numpy as np
import scipy.linalg

from . import Kernel
from . import Shift
from .Estimator import Dataset
from .errors import ContractViolation, DegenerateInput, NumericError
from .settings import log_file_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# relative slack on the right-hand sides
rtol = 1e-8

# absolute slack, for inequalities whose sides are both zero
atol = 1e-12

# the largest matrices an OperatorPair may hold
maxdimension = 50

# how many cases in each randomized suite?
ncases = 200


def opnorm(A):
    """the spectral norm"""
    return float(np.linalg.norm(A, 2)) if np.size(A) else 0.0


def power(A, s):
    """A**s for a symmetric PSD matrix, through its eigendecomposition."""
    theta, V = scipy.linalg.eigh(A)
    theta = np.clip(theta, 0.0, None)
    return (V * theta ** s).dot(V.T)


def checkPSD(A, name='matrix'):
    A = np.atleast_2d(np.array(A, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractViolation('{} must be square, got shape {}'.format(name, A.shape))
    scale = max(1.0, np.max(np.abs(A)))
    if np.max(np.abs(A - A.T)) > 1e-12 * scale:
        raise ContractViolation('{} is not symmetric'.format(name))
    A = 0.5 * (A + A.T)
    if np.linalg.eigvalsh(A)[0] < -1e-10 * max(opnorm(A), 1e-300):
        raise ContractViolation('{} is not positive semidefinite'.format(name))
    return A


class OperatorPair(object):
    """Two symmetric PSD matrices of the same size, with a common norm cap."""

    def __init__(self, A, B, cap=None):
        self.A = checkPSD(A, 'A')
        self.B = checkPSD(B, 'B')
        if self.A.shape != self.B.shape:
            raise ContractViolation('A and B differ in shape, {} and {}'.format(self.A.shape, self.B.shape))
        if self.d > maxdimension:
            raise ContractViolation('operator pairs are limited to {} dimensions'.format(maxdimension))
        self.cap = max(opnorm(self.A), opnorm(self.B)) if cap is None else float(cap)

    @property
    def d(self):
        return self.A.shape[0]

    def __repr__(self):
        return '<OperatorPair(d={}, cap={:.4g})>'.format(self.d, self.cap)


def finish(report, lhs, rhs, *counterexample):
    report['lhs'], report['rhs'] = float(lhs), float(rhs)
    report['passed'] = bool(lhs <= rhs * (1 + rtol) + atol)
    if not report['passed']:
        logger.error('{} failed: {} > {}'.format(report['check'], lhs, rhs))
        for matrix in counterexample:
            logger.error('counterexample:\n{}'.format(np.array2string(np.asarray(matrix), precision=17)))
    return report


def check_cordes(pair, s):
    """||A**s B**s|| <= ||A B||**s for 0 <= s <= 1."""
    if not 0 <= s <= 1:
        raise ContractViolation('s must lie in [0,1], got {}'.format(s))
    lhs = opnorm(power(pair.A, s).dot(power(pair.B, s)))
    rhs = opnorm(pair.A.dot(pair.B)) ** s
    return finish(dict(check='cordes', parameter=float(s), d=pair.d), lhs, rhs, pair.A, pair.B)


def check_power_difference(pair, t):
    """||A**t - B**t|| <= t C**(t-1) ||A - B|| for t >= 1 and ||A||, ||B|| <= C."""
    if not t >= 1:
        raise ContractViolation('t must be >= 1, got {}'.format(t))
    if max(opnorm(pair.A), opnorm(pair.B)) > pair.cap * (1 + 1e-12):
        raise ContractViolation('the norms of A and B exceed the cap {}'.format(pair.cap))
    lhs = opnorm(power(pair.A, t) - power(pair.B, t))
    rhs = t * pair.cap ** (t - 1) * opnorm(pair.A - pair.B)
    return finish(dict(check='power_difference', parameter=float(t), d=pair.d), lhs, rhs, pair.A, pair.B)


def sqrtGram(data, kernel):
    K = kernel.gram(data.x).entries
    theta, V = scipy.linalg.eigh(K)
    if theta[0] < -1e-8 * max(theta[-1], 1e-300):
        raise NumericError('the Gram matrix has a negative eigenvalue {}'.format(theta[0]))
    return (V * np.sqrt(np.clip(theta, 0.0, None))).dot(V.T)


def check_normalization_gap(data, kernel):
    """||S^T W_bar S - S^T W S|| <= kappa**2 |1 - mean(w)|, with W_bar the normalized weights."""
    w = data.raw_weights
    mean = np.mean(w)
    if not mean > 0:
        raise DegenerateInput('the weights sum to zero')
    root = sqrtGram(data, kernel)
    gap = (root * (w / mean - w)).dot(root) / data.n
    lhs = np.max(np.abs(np.linalg.eigvalsh(0.5 * (gap + gap.T))))
    rhs = kernel.kappa ** 2 * abs(1 - mean)
    return finish(dict(check='normalization_gap', parameter=float(mean), d=data.n), lhs, rhs, data.x, w)


def check_operator_norm(data, kernel, D_n):
    """||S^T W_hat S|| <= D_n kappa**2 for clipped weights, ||S^T W_bar S|| <= n kappa**2 for normalized ones."""
    K = kernel.gram(data.x).entries
    kappa2 = kernel.kappa ** 2

    def norm(v):
        s = np.sqrt(v)
        return np.max(np.linalg.eigvalsh(s[:, np.newaxis] * K * s[np.newaxis, :] / data.n))

    clipped = finish(dict(check='clipped_norm', parameter=float(D_n), d=data.n),
                     norm(Shift.clip_weights(data.raw_weights, D_n)), D_n * kappa2, data.x, data.raw_weights)
    normalized = finish(dict(check='normalized_norm', parameter=float(data.n), d=data.n),
                        norm(Shift.normalize_weights(data.raw_weights)), data.n * kappa2,
                        data.x, data.raw_weights)
    return dict(clipped=clipped, normalized=normalized, passed=clipped['passed'] and normalized['passed'])


def clippedOperator(mu, shift, D_n, panels=Shift.npanels, chunk=10000):
    """The matrix sqrt(mu_j mu_k) int phi_j phi_k min(1, D_n/w) d rho_te, by the midpoint rule."""
    m = len(mu)
    G = np.zeros((m, m))
    h = 1.0 / panels
    for start in range(0, panels, chunk):
        x = (np.arange(start, min(start + chunk, panels)) + 0.5) * h
        phi = Kernel.basis(x, m)
        ratio = np.minimum(1.0, D_n / shift.density_ratio(x))
        G += (phi * ratio[:, np.newaxis]).T.dot(phi)
    G *= h
    if not np.all(np.isfinite(G)):
        raise NumericError('the clipped operator quadrature did not converge')
    root = np.sqrt(mu)
    return root[:, np.newaxis] * G * root[np.newaxis, :]


def check_effdim_clipping(problem, shift, D_n, lambda_grid):
    """N_hat(lambda) <= N(lambda), with N_hat the effective dimension of the clipped operator."""
    if not D_n > 1:
        raise ContractViolation('the clipping threshold must satisfy D_n > 1, got {}'.format(D_n))
    lambdas = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    if lambdas.size == 0 or np.any(lambdas <= 0):
        raise ContractViolation('the lambda grid must be positive')
    theta = np.clip(np.linalg.eigvalsh(clippedOperator(problem.mu, shift, D_n)), 0.0, None)
    report = dict(check='effdim_clipping', parameter=float(D_n), shift=repr(shift),
                  lambdas=[], clipped=[], unclipped=[])
    for lam in lambdas:
        report['lambdas'].append(float(lam))
        report['clipped'].append(float(np.sum(theta / (lam + theta))))
        report['unclipped'].append(problem.effective_dimension(lam))
    clipped, unclipped = np.array(report['clipped']), np.array(report['unclipped'])
    report['passed'] = bool(np.all(clipped <= unclipped * (1 + 1e-6)))
    if not report['passed']:
        logger.error('clipped effective dimension exceeds N(lambda) for {} at D_n = {}'.format(shift, D_n))
    return report


def randomPSD(prng, d, scale=None):
    """G G^T with standard normal G, optionally rescaled to spectral norm scale."""
    G = prng.standard_normal((d, d))
    A = G.dot(G.T)
    if scale is not None:
        A *= scale / opnorm(A)
    return A


def row(suite, case, report):
    return dict(suite=suite, case=case, parameter=report['parameter'], lhs=report['lhs'],
                rhs=report['rhs'], passed=report['passed'])


def cordes_suite(cases=ncases, seed=0):
    prng = np.random.default_rng(seed)
    rows = []
    for case in range(cases):
        d = int(prng.integers(1, 11))
        pair = OperatorPair(randomPSD(prng, d), randomPSD(prng, d))
        rows.append(row('cordes', case, check_cordes(pair, (0.25, 0.5, 0.75)[case % 3])))
    return rows


def power_difference_suite(cases=ncases, seed=1):
    prng = np.random.default_rng(seed)
    rows = []
    for case in range(cases):
        d = int(prng.integers(1, 11))
        pair = OperatorPair(randomPSD(prng, d, scale=prng.uniform(0.5, 2)),
                            randomPSD(prng, d, scale=prng.uniform(0.5, 2)))
        rows.append(row('power_difference', case, check_power_difference(pair, (1.5, 2.0, 3.0)[case % 3])))
    return rows


def suiteKernels():
    return [Kernel.GaussianRBF(bandwidth=0.2), Kernel.TruncatedBasis(np.arange(1, 17) ** -2.0)]


def normalization_gap_suite(cases=ncases, seed=2):
    prng = np.random.default_rng(seed)
    shift = Shift.LogShift()
    kernels = suiteKernels()
    rows = []
    for case in range(cases):
        n = int(prng.integers(1, 51))
        x = shift.sample(n, prng)
        data = Dataset(x, np.zeros(n), shift.density_ratio(x))
        rows.append(row('normalization_gap', case, check_normalization_gap(data, kernels[case % 2])))
    return rows


def operator_norm_suite(cases=ncases, seed=3):
    prng = np.random.default_rng(seed)
    shift = Shift.LogShift()
    kernels = suiteKernels()
    rows = []
    for case in range(cases):
        n = int(prng.integers(1, 51))
        x = shift.sample(n, prng)
        data = Dataset(x, np.zeros(n), shift.density_ratio(x))
        report = check_operator_norm(data, kernels[case % 2], (1.5, 2.0, 4.0)[case % 3])
        rows.append(row('clipped_norm', case, report['clipped']))
        rows.append(row('normalized_norm', case, report['normalized']))
    return rows


def effdim_clipping_suite(m=32, nlambda=25):
    """Every (shift, D_n, lambda) combination counts as a case."""
    from .Problem import make_problem

    lambdas = np.logspace(-4, 0, nlambda)
    rows = []
    for shift in (Shift.NoShift(), Shift.BoundedShift(a=0.5), Shift.LogShift()):
        problem = make_problem(0.5, 1.0, m, 0.0, shift=shift)
        for D_n in (1.5, 2.0, 4.0):
            report = check_effdim_clipping(problem, shift, D_n, lambdas)
            for i, lam in enumerate(report['lambdas']):
                rows.append(dict(suite='effdim_clipping', case=len(rows), parameter=lam,
                                 lhs=report['clipped'][i], rhs=report['unclipped'][i],
                                 passed=bool(report['clipped'][i] <= report['unclipped'][i] * (1 + 1e-6))))
    return rows


# the randomized suites, in the order they are run
suites = dict(cordes=cordes_suite,
              power_difference=power_difference_suite,
              normalization_gap=normalization_gap_suite,
              operator_norm=operator_norm_suite,
              effdim_clipping=effdim_clipping_suite)


def run_diagnostics(names=None):
    """Run the named suites (all of them by default) and return their rows."""
    names = list(suites.keys()) if names is None else names
    rows = []
    for name in names:
        if name not in suites:
            raise ContractViolation('unknown diagnostic suite "{}" (expected one of {})'.format(
                name, list(suites.keys())))
        these = suites[name]()
        failed = sum(not r['passed'] for r in these)
        logger.info('{}: {} cases, {} failed'.format(name, len(these), failed))
        rows.extend(these)
    return rows
