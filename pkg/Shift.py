"""Covariate shift between training and test marginals on [0,1].

The test marginal is always Uniform[0,1]; each Shift describes a training
density q(x) and the density ratio w(x) = 1/q(x) = d rho_te / d rho_tr.
This module also holds the weighting schemes (unweighted, exact, normalized,
clipped), the clipping threshold schedule, Renyi divergences and the moment
condition on w."""
import logging

import numpy as np
import scipy.special

from .errors import DomainError, ContractViolation, DegenerateInput, NumericError
from .settings import log_file_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# how many panels in the composite midpoint rule on (0,1]?
npanels = 100000

# rejection sampling gives up after this many proposals
maxattempts = 10 ** 6

# how many points in the grid used for essential suprema?
nsupgrid = 10000


def midpoint(f, panels=npanels, chunk=100000):
    """Composite midpoint rule for the integral of f over (0,1], taken in t = x**(1/4).

    The substitution x = t**4 flattens the logarithmic singularities of the
    density ratio moments at 0; f is never evaluated at 0."""
    h = 1.0 / panels
    total = 0.0
    for start in range(0, panels, chunk):
        t = (np.arange(start, min(start + chunk, panels)) + 0.5) * h
        total += np.sum(f(t ** 4) * 4 * t ** 3)
    return total * h


def supgrid():
    """The grid on (0,1] used for essential suprema."""
    return np.linspace(0.0, 1.0, nsupgrid + 1)[1:]


def check_points(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError('density ratios are defined on (0,1]')
    return x


class Shift(object):
    """The Shift class defines the basics of a train/test pair:
        the training density q, the ratio w = 1/q, rejection sampling from q,
        and the constants (alpha, C, sigma) of the moment condition on w."""

    name = 'shift'

    def __init__(self, alpha=1.0, C=1.0, sigma=1.0):
        if not 0 <= alpha <= 1:
            raise ContractViolation('alpha must lie in [0,1], got {}'.format(alpha))
        if not (C > 0 and sigma > 0):
            raise ContractViolation('C and sigma must be positive, got {} and {}'.format(C, sigma))
        self.alpha, self.C, self.sigma = float(alpha), float(C), float(sigma)

    def train_density(self, x):
        raise RuntimeError("No implemented for base Shift class")

    def density_ratio(self, x):
        """w(x) = d rho_te/d rho_tr (x)."""
        x = check_points(x)
        with np.errstate(divide='ignore'):
            w = 1.0 / self.train_density(x)
        if w.ndim == 0:
            return float(w)
        return w

    @property
    def envelope(self):
        """an upper bound on the training density, for rejection sampling"""
        raise RuntimeError("No implemented for base Shift class")

    @property
    def esssup(self):
        """the essential supremum of w with respect to rho_te"""
        raise RuntimeError("No implemented for base Shift class")

    def sample(self, n, prng):
        """Draw n points from the training density, by rejection against Uniform(0,1]."""
        cap = maxattempts
        accepted, count, attempts = [], 0, 0
        while count < n:
            batch = max(2 * (n - count), 16)
            x = 1.0 - prng.random(batch)
            keep = prng.random(batch) * self.envelope < self.train_density(x)
            accepted.append(x[keep])
            count += np.sum(keep)
            attempts += batch
            if attempts > cap:
                raise NumericError('rejection sampling for {} gave up after {} attempts'.format(self, attempts))
        return np.concatenate(accepted)[:n]

    def checkNormalization(self):
        """The integral of w q over (0,1], which must be 1."""
        return midpoint(lambda x: self.density_ratio(x) * self.train_density(x))

    @property
    def inputs(self):
        return dict(family=self.name, alpha=self.alpha, C=self.C, sigma=self.sigma)

    def __repr__(self):
        return '<{}(alpha={}, C={}, sigma={})>'.format(self.__class__.__name__, self.alpha, self.C, self.sigma)


class NoShift(Shift):
    """Training and test marginals are both uniform, w = 1."""

    name = 'none'

    def train_density(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    @property
    def envelope(self):
        return 1.0

    @property
    def esssup(self):
        return 1.0


class BoundedShift(Shift):
    """q(x) = 1 + a sin(2 pi x), so w = 1/q lies in [1/(1+a), 1/(1-a)]."""

    name = 'bounded'

    def __init__(self, a=0.5, **kw):
        super(BoundedShift, self).__init__(**kw)
        if not 0 < a < 1:
            raise ContractViolation('the bounded shift needs 0 < a < 1, got {}'.format(a))
        self.a = float(a)

    def train_density(self, x):
        return 1.0 + self.a * np.sin(2 * np.pi * np.asarray(x, dtype=float))

    @property
    def envelope(self):
        return 1.0 + self.a

    @property
    def esssup(self):
        return 1.0 / (1.0 - self.a)

    @property
    def inputs(self):
        d = super(BoundedShift, self).inputs
        d['a'] = self.a
        return d

    def __repr__(self):
        return '<BoundedShift(a={}, alpha={}, C={}, sigma={})>'.format(self.a, self.alpha, self.C, self.sigma)


class LogShift(Shift):
    """q(x) = 1/(Z (1 - ln x)) on (0,1], so w(x) = Z (1 - ln x) is unbounded near 0.

    Every moment of w is finite, with factorial growth, because the integral
    of (-ln x)**m over (0,1] is m!."""

    name = 'log'

    def __init__(self, **kw):
        super(LogShift, self).__init__(**kw)
        # Z = integral of 1/(1 - ln t) over (0,1], computed once
        self.Z = midpoint(lambda t: 1.0 / (1.0 - np.log(t)))
        logger.debug('LogShift normalization Z = {}'.format(self.Z))

    def train_density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore'):
            return 1.0 / (self.Z * (1.0 - np.log(x)))

    def density_ratio(self, x):
        x = check_points(x)
        with np.errstate(divide='ignore'):
            w = self.Z * (1.0 - np.log(x))
        if w.ndim == 0:
            return float(w)
        return w

    @property
    def envelope(self):
        return 1.0 / self.Z

    @property
    def esssup(self):
        return np.inf


def makeShift(**kwargs):
    """use keywords to select a kind of Shift and construct it"""
    family = kwargs.get('family', 'none').lower()
    kw = {k: kwargs[k] for k in ('alpha', 'C', 'sigma') if kwargs.get(k) is not None}
    if family == 'none':
        return NoShift(**kw)
    elif family == 'bounded':
        return BoundedShift(a=kwargs.get('a', 0.5), **kw)
    elif family == 'log':
        return LogShift(**kw)
    else:
        raise ContractViolation('unknown shift family "{}"'.format(family))


def density_ratio(shift, x):
    """Return w(x) for a shift."""
    return shift.density_ratio(x)


def check_weights(w):
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if w.size == 0:
        raise ContractViolation('need at least one weight')
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ContractViolation('weights must be finite and nonnegative')
    return w


def normalize_weights(w):
    """w_bar_i = w_i / ((1/n) sum_j w_j); the output has mean 1 and lies in [0, n]."""
    w = check_weights(w)
    mean = np.mean(w)
    if not mean > 0:
        raise DegenerateInput('cannot normalize weights that are all zero')
    return w / mean


def clip_weights(w, D_n):
    """w_hat_i = w_i if w_i < D_n, else D_n (requires D_n > 1)."""
    w = check_weights(w)
    if not D_n > 1:
        raise ContractViolation('the clipping threshold must satisfy D_n > 1, got {}'.format(D_n))
    return np.minimum(w, D_n)


def clipping_threshold(n, r, alpha, epsilon, beta):
    """D_n = n**(alpha eps) for 1/2 <= r <= 3/2, else n**(alpha eps/(r - 1/2))."""
    if not (int(n) == n and n >= 1):
        raise ContractViolation('n must be a positive integer, got {}'.format(n))
    if r < 0.5:
        raise ContractViolation('r must be >= 1/2, got {}'.format(r))
    if not 0 < alpha <= 1:
        raise ContractViolation('alpha must lie in (0,1], got {}'.format(alpha))
    if not 0 < epsilon < r / (2 * r + beta):
        raise ContractViolation('epsilon must lie in (0, r/(2r+beta)) = (0, {}), got {}'.format(
            r / (2 * r + beta), epsilon))
    if r <= 1.5:
        D_n = float(n) ** (alpha * epsilon)
    else:
        D_n = float(n) ** (alpha * epsilon / (r - 0.5))
    if not D_n > 1:
        raise ContractViolation('n = {} is too small to make D_n = {} > 1'.format(n, D_n))
    return D_n


class WeightScheme(object):
    """The WeightScheme class turns raw density ratios into the effective weights of a fit."""

    name = 'scheme'

    def effective(self, raw):
        raise RuntimeError("No implemented for base WeightScheme class")

    @property
    def code(self):
        return self.name

    def __repr__(self):
        return '<{}>'.format(self.code)


class Unweighted(WeightScheme):
    """W = I (the classical spectral algorithm)."""

    name = 'unweighted'

    def effective(self, raw):
        return np.ones_like(check_weights(raw))


class Exact(WeightScheme):
    """W = diag(w(x_i))."""

    name = 'exact'

    def effective(self, raw):
        return check_weights(raw).copy()


class Normalized(WeightScheme):
    """W = diag(w_bar(x_i)), weights divided by their empirical mean."""

    name = 'normalized'

    def effective(self, raw):
        return normalize_weights(raw)


class Clipped(WeightScheme):
    """W = diag(w_hat(x_i)), weights clipped at D_n > 1."""

    name = 'clipped'

    def __init__(self, D_n=2.0):
        if not D_n > 1:
            raise ContractViolation('the clipping threshold must satisfy D_n > 1, got {}'.format(D_n))
        self.D_n = float(D_n)

    def effective(self, raw):
        return clip_weights(raw, self.D_n)

    @property
    def code(self):
        return 'clipped({:.6g})'.format(self.D_n)


def makeScheme(name, D_n=None):
    """construct a WeightScheme from its name"""
    name = name.lower()
    if name == 'unweighted':
        return Unweighted()
    elif name == 'exact':
        return Exact()
    elif name == 'normalized':
        return Normalized()
    elif name == 'clipped':
        if D_n is None:
            raise ContractViolation('the clipped scheme needs a threshold D_n')
        return Clipped(D_n)
    else:
        raise ContractViolation('unknown weighting scheme "{}"'.format(name))


def renyi_divergence(shift, a):
    """H_a = a**-1 log(integral of w**a d rho_te), or log(ess sup w) for a = inf."""
    if not a > 0:
        raise ContractViolation('the Renyi order must be positive, got {}'.format(a))
    if np.isinf(a):
        return float(np.log(shift.esssup))
    integral = midpoint(lambda x: shift.density_ratio(x) ** a)
    if not (np.isfinite(integral) and integral > 0):
        raise NumericError('the Renyi integral of order {} for {} did not converge'.format(a, shift))
    return float(np.log(integral) / a)


def moment(shift, p, alpha):
    """(integral of w**((p-1)/alpha) d rho_te)**alpha, or ess sup w**(p-1) for alpha = 0."""
    if alpha == 0:
        gridsup = np.max(shift.density_ratio(supgrid()))
        return float(max(gridsup, shift.esssup) ** (p - 1))
    integral = midpoint(lambda x: shift.density_ratio(x) ** ((p - 1) / alpha))
    if not np.isfinite(integral):
        raise NumericError('moment {} of {} did not converge'.format(p, shift))
    return float(integral ** alpha)


def check_moment_condition(shift, alpha=None, C=None, sigma=None, p_max=10):
    """Compare the weight moments against 1/2 p! C**(p-2) sigma**2 for p = 2..p_max."""
    alpha = shift.alpha if alpha is None else alpha
    C = shift.C if C is None else C
    sigma = shift.sigma if sigma is None else sigma
    if not 2 <= p_max <= 20:
        raise ContractViolation('p_max must lie in [2, 20], got {}'.format(p_max))
    report = dict(shift=repr(shift), alpha=alpha, C=C, sigma=sigma, p=[], lhs=[], rhs=[], ratio=[])
    for p in range(2, p_max + 1):
        lhs = moment(shift, p, alpha)
        rhs = 0.5 * scipy.special.factorial(p, exact=True) * C ** (p - 2) * sigma ** 2
        report['p'].append(p)
        report['lhs'].append(lhs)
        report['rhs'].append(rhs)
        report['ratio'].append(lhs / rhs)
    report['passed'] = bool(np.all(np.array(report['ratio']) <= 1.0))
    logger.info('moment condition for {} up to p = {}: {}'.format(
        shift, p_max, {True: 'passed', False: 'FAILED'}[report['passed']]))
    return report


def check_renyi_bound(shift, p_max=10):
    """The Renyi form of the moment condition,
        H_{(p-1)/alpha} <= (log p! + log(C**(p-2) sigma**2/2))/(p-1), for alpha > 0."""
    if not shift.alpha > 0:
        raise ContractViolation('the Renyi form needs alpha > 0')
    if not 2 <= p_max <= 20:
        raise ContractViolation('p_max must lie in [2, 20], got {}'.format(p_max))
    report = dict(shift=repr(shift), p=[], divergence=[], bound=[])
    for p in range(2, p_max + 1):
        divergence = renyi_divergence(shift, (p - 1) / shift.alpha)
        bound = (np.log(float(scipy.special.factorial(p, exact=True)))
                 + np.log(shift.C ** (p - 2) * shift.sigma ** 2 / 2.0)) / (p - 1)
        report['p'].append(p)
        report['divergence'].append(divergence)
        report['bound'].append(float(bound))
    report['passed'] = bool(np.all(np.array(report['divergence']) <= np.array(report['bound'])))
    return report
