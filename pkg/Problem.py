"""Synthetic regression problems with exactly known regularity and capacity.

The kernel is a TruncatedBasis with eigenvalues mu_k = k**(-1/beta) on the
trigonometric basis, which is orthonormal in L2(rho_te) = L2(Uniform[0,1]).
The target is

    f_rho = sum_k mu_k**r a_k phi_k = L_K**r u_rho,    u_rho = sum_k a_k phi_k,

so the source condition holds exactly with regularity r, and the effective
dimension N(lambda) = sum_k mu_k/(lambda + mu_k) is of order lambda**(-beta).
Labels are y = f_rho(x) + xi with xi ~ Uniform[-M, M]."""
import logging

import numpy as np

from . import Kernel
from .Shift import NoShift
from .Estimator import Dataset
from .errors import ContractViolation
from .settings import log_file_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# the lambda schedules that can be asked for
schedules = ('thm1', 'cor1', 'thm3', 'thm4')


def target_coefficients(m, decay=0.51):
    """a_k = (-1)**(k+1) k**(-decay), square-summable for decay > 1/2."""
    k = np.arange(1, m + 1)
    return np.where(k % 2 == 1, 1.0, -1.0) * k ** (-decay)


class SyntheticProblem(object):
    """A regression problem with known (r, beta), noise bound and covariate shift."""

    def __init__(self, beta=0.5, r=1.0, m=512, noise=0.1, shift=None, seed=0, target=None):
        if not 0 < beta <= 1:
            raise ContractViolation('beta must lie in (0,1], got {}'.format(beta))
        if not r >= 0.5:
            raise ContractViolation('r must be >= 1/2, got {}'.format(r))
        if int(m) != m or m < 1:
            raise ContractViolation('m must be a positive integer, got {}'.format(m))
        if not noise >= 0:
            raise ContractViolation('the noise bound must be nonnegative, got {}'.format(noise))
        if int(seed) != seed or seed < 0:
            raise ContractViolation('the seed must be an unsigned integer, got {}'.format(seed))

        self.beta, self.r, self.m = float(beta), float(r), int(m)
        self.noise = float(noise)
        self.shift = NoShift() if shift is None else shift
        self.seed = int(seed)

        k = np.arange(1, self.m + 1)
        self.mu = k ** (-1.0 / self.beta)
        if target is None:
            self.a = target_coefficients(self.m)
        else:
            a = np.array(target, dtype=float).ravel()
            if a.size > self.m:
                raise ContractViolation('{} target coefficients for only {} eigenfunctions'.format(a.size, self.m))
            self.a = np.zeros(self.m)
            self.a[:a.size] = a
        for v in (self.mu, self.a):
            v.setflags(write=False)

        self.kernel = Kernel.TruncatedBasis(self.mu)
        logger.info('created {}'.format(self))

    @property
    def coefficients(self):
        """the basis coefficients mu_k**r a_k of f_rho"""
        return self.mu ** self.r * self.a

    @property
    def u_rho_norm(self):
        """||u_rho||, with u_rho = sum_k a_k phi_k"""
        return float(np.sqrt(np.sum(self.a ** 2)))

    def f_rho(self, x):
        """the regression function sum_k mu_k**r a_k phi_k(x)"""
        scalar = np.ndim(x) == 0
        x = Kernel.check_points(np.atleast_1d(x))
        beta = self.coefficients
        values = np.empty(x.shape)
        for start in range(0, len(x), 4096):
            values[start:start + 4096] = Kernel.basis(x[start:start + 4096], self.m).dot(beta)
        if scalar:
            return float(values[0])
        return values

    def prng(self, trial_index):
        """the random stream for one trial, derived from (seed, trial_index)"""
        return np.random.default_rng([self.seed, int(trial_index)])

    def sample(self, n, trial_index):
        """Draw n training samples (x from rho_tr, y = f_rho(x) + noise, w(x))."""
        if int(n) != n or n < 1:
            raise ContractViolation('n must be a positive integer, got {}'.format(n))
        prng = self.prng(trial_index)
        x = self.shift.sample(int(n), prng)
        y = self.f_rho(x) + prng.uniform(-self.noise, self.noise, int(n))
        return Dataset(x, y, self.shift.density_ratio(x))

    def effective_dimension(self, lam):
        """N(lambda) = Tr((lambda I + L_K)^-1 L_K) = sum_k mu_k/(lambda + mu_k)."""
        if not lam > 0:
            raise ContractViolation('lambda must be positive, got {}'.format(lam))
        return float(np.sum(self.mu / (lam + self.mu)))

    def capacity(self, lambdas=None):
        """N(lambda) lambda**beta over a log-spaced lambda grid (bounded under the capacity assumption)."""
        if lambdas is None:
            lambdas = np.logspace(-4, 0, 41)
        lambdas = np.asarray(lambdas, dtype=float)
        return lambdas, np.array([self.effective_dimension(lam) * lam ** self.beta for lam in lambdas])

    @property
    def inputs(self):
        return dict(beta=self.beta, r=self.r, m=self.m, noise=self.noise, seed=self.seed)

    def __repr__(self):
        return '<SyntheticProblem(beta={}, r={}, m={}, M={}, {})>'.format(
            self.beta, self.r, self.m, self.noise, self.shift)


def make_problem(beta, r, m, noise_bound, shift=None, seed=0, target=None):
    """Build a SyntheticProblem (the kernel is problem.kernel)."""
    return SyntheticProblem(beta=beta, r=r, m=m, noise=noise_bound, shift=shift, seed=seed, target=target)


def f_rho_eval(problem, x):
    """Evaluate the regression function of a problem."""
    return problem.f_rho(x)


def sample_train(problem, n, trial_index):
    """Draw a training Dataset; the same (seed, trial_index) always gives the same data."""
    return problem.sample(n, trial_index)


def checkSchedule(variant, r, beta, alpha, epsilon):
    variant = variant.lower()
    if variant not in schedules:
        raise ContractViolation('unknown schedule "{}" (expected one of {})'.format(variant, schedules))
    if not r >= 0.5:
        raise ContractViolation('r must be >= 1/2, got {}'.format(r))
    if not 0 < beta <= 1:
        raise ContractViolation('beta must lie in (0,1], got {}'.format(beta))
    if variant == 'thm1':
        if not 0 < alpha <= 1:
            raise ContractViolation('alpha must lie in (0,1], got {}'.format(alpha))
        if beta + alpha * (1 - beta) < 1:
            raise ContractViolation('the thm1 schedule needs beta + alpha(1-beta) >= 1, got {}'.format(
                beta + alpha * (1 - beta)))
    if variant == 'thm3':
        if epsilon is None or not 0 < epsilon < r / (2 * r + beta):
            raise ContractViolation('epsilon must lie in (0, r/(2r+beta)) = (0, {}), got {}'.format(
                r / (2 * r + beta), epsilon))
    return variant


def lambda_schedule(variant, n, r, beta, alpha=1.0, epsilon=None):
    """The regularization parameter prescribed by a theorem:

        thm1: n**(-1/(min(2r,3) + beta + alpha(1-beta)))   (normalized weights)
        cor1: n**(-1/(min(2r,3) + 1))                       (normalized, capacity-independent)
        thm3: n**(-1/(2r+beta) + epsilon/r)                 (clipped weights)
        thm4: n**(-1/(2r+beta))                             (unweighted, bounded ratio)"""
    variant = checkSchedule(variant, r, beta, alpha, epsilon)
    if not n >= 1:
        raise ContractViolation('n must be positive, got {}'.format(n))
    n = float(n)
    if variant == 'thm1':
        return n ** (-1.0 / (min(2 * r, 3) + beta + alpha * (1 - beta)))
    elif variant == 'cor1':
        return n ** (-1.0 / (min(2 * r, 3) + 1))
    elif variant == 'thm3':
        return n ** (-1.0 / (2 * r + beta) + epsilon / r)
    else:
        return n ** (-1.0 / (2 * r + beta))


def landweber_steps(lam):
    """For Landweber callers: t = round(1/lambda) and the effective lambda 1/t."""
    t = max(1, int(round(1.0 / lam)))
    return t, 1.0 / t


def theoretical_exponent(variant, r, beta, alpha=1.0, epsilon=None):
    """The exponent of n in the theorem's bound on ||f - f_rho|| (norm scale, not squared)."""
    variant = checkSchedule(variant, r, beta, alpha, epsilon)
    if variant == 'thm1':
        return -min(r, 1.5) / (min(2 * r, 3) + beta + alpha * (1 - beta))
    elif variant == 'cor1':
        return -min(r, 1.5) / (min(2 * r, 3) + 1)
    elif variant == 'thm3':
        return -(r / (2 * r + beta) - epsilon)
    else:
        return -r / (2 * r + beta)
