"""Filter functions g_lambda for spectral regularization.

A filter g_lambda: [0,U] -> R (0 < lambda <= U) with qualification nu_g satisfies

    sup |g_lambda(u)| <= b/lambda,   sup |g_lambda(u) u| <= b,
    sup |1 - g_lambda(u) u| u**nu <= gamma_nu lambda**nu   for 0 < nu <= nu_g.

Tikhonov (ridge), Landweber iteration (gradient descent, lambda = 1/t) and
spectral cutoff are implemented, along with a numerical check of the
conditions above on (lambda, u) grids."""
import logging
import functools

import numpy as np
import scipy.optimize

from .errors import DomainError, InconsistencyError, ContractViolation
from .settings import log_file_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# the relative slack allowed when checking the filter conditions
tolerance = 1e-9

# the nu values reported in a gamma table, unless others are asked for
default_nus = (0.5, 1.0, 2.0, 3.0)


class Filter(object):
    """The Filter class defines the basics of a filter function:
        evaluation on [0,U] with domain checks, the residual 1 - u g(u),
        and the constants (b, qualification, gamma_nu) of the definition."""

    name = 'filter'
    b = 1.0
    qualification = np.inf

    def __init__(self, U=1.0):
        if not U > 0:
            raise ContractViolation('the domain cap U must be positive, got {}'.format(U))
        self.U = float(U)

    def check(self, lam, u):
        """Make sure 0 < lambda <= U and 0 <= u <= U."""
        lam = np.asarray(lam, dtype=float)
        u = np.asarray(u, dtype=float)
        if np.any(~np.isfinite(lam)) or np.any(lam <= 0) or np.any(lam > self.U):
            raise DomainError('lambda must lie in (0, {}], got {}'.format(self.U, lam))
        if np.any(~np.isfinite(u)) or np.any(u < 0) or np.any(u > self.U):
            raise DomainError('u must lie in [0, {}]'.format(self.U))
        return lam, u

    def g(self, lam, u):
        raise RuntimeError("No implemented for base Filter class")

    def apply(self, lam, u):
        """Return g_lambda(u), after checking the domain."""
        lam, u = self.check(lam, u)
        values = self.g(lam, u)
        if np.ndim(values) == 0:
            return float(values)
        return values

    def residual(self, lam, u):
        """Return 1 - u g_lambda(u)."""
        lam, u = self.check(lam, u)
        return 1.0 - u * self.g(lam, u)

    def scaledLambda(self, lam, rescale):
        """The lambda to use on a spectrum that has been divided by rescale."""
        return lam / rescale

    def gamma(self, nu):
        """gamma_nu, for 0 < nu <= qualification."""
        raise RuntimeError("No implemented for base Filter class")

    def checkNu(self, nu):
        if not (0 < nu <= self.qualification):
            raise ContractViolation('nu = {} is outside (0, {}] for {}'.format(nu, self.qualification, self))

    def constants(self, nus=default_nus):
        """Return (b, qualification, {nu: gamma_nu}) for the nu's within the qualification."""
        table = {nu: self.gamma(nu) for nu in nus if 0 < nu <= self.qualification}
        return self.b, self.qualification, table

    @property
    def code(self):
        """a short string describing the filter"""
        return self.name

    @property
    def inputs(self):
        return dict(kind=self.name)

    def __repr__(self):
        return '<{0}>'.format(self.code)


class Tikhonov(Filter):
    """g_lambda(u) = 1/(lambda + u); b = 1, qualification 1, gamma_nu = 1."""

    name = 'tikhonov'
    qualification = 1.0

    def g(self, lam, u):
        return 1.0 / (lam + u)

    def gamma(self, nu):
        self.checkNu(nu)
        return 1.0


class SpectralCutoff(Filter):
    """g_lambda(u) = 1/u if u >= lambda, else 0; b = 1, infinite qualification, gamma_nu = 1."""

    name = 'cutoff'

    def g(self, lam, u):
        lam, u = np.broadcast_arrays(lam, u)
        keep = u >= lam
        return np.divide(1.0, u, out=np.zeros(u.shape), where=keep)

    def residual(self, lam, u):
        # exactly 0 on the kept part of the spectrum, 1 on the rest
        lam, u = self.check(lam, u)
        lam, u = np.broadcast_arrays(lam, u)
        return np.where(u >= lam, 0.0, 1.0)

    def gamma(self, nu):
        self.checkNu(nu)
        return 1.0


@functools.lru_cache(maxsize=None)
def landweberGamma(t, nu, ngrid=10001):
    """sup_u (1-u)**t u**nu / lambda**nu with lambda = 1/t, on a grid then refined."""
    lam = 1.0 / t

    def ratio(u):
        return (1.0 - u) ** t * u ** nu / lam ** nu

    u = np.linspace(0.0, 1.0, ngrid)
    values = ratio(u)
    i = np.argmax(values)
    lo, hi = u[max(i - 1, 0)], u[min(i + 1, ngrid - 1)]
    refined = scipy.optimize.minimize_scalar(lambda v: -ratio(v), bounds=(lo, hi),
                                             method='bounded', options=dict(xatol=1e-13))
    best = max(values[i], -refined.fun)
    logger.debug('Landweber t={} gamma_{} = {}'.format(t, nu, best))
    return float(best)


class Landweber(Filter):
    """Landweber iteration with t steps: g(u) = sum_{i<t} (1-u)**i, lambda = 1/t.

    b = 1 and the qualification is infinite; gamma_nu is not known in closed
    form here, so it is computed numerically for each t and nu."""

    name = 'landweber'

    def __init__(self, t=10, U=1.0):
        super(Landweber, self).__init__(U=U)
        if int(t) != t or t < 1:
            raise ContractViolation('Landweber needs a positive integer t, got {}'.format(t))
        self.t = int(t)

    @classmethod
    def fromLambda(cls, lam, U=1.0):
        """Round t = round(1/lambda); the effective lambda is 1/t."""
        if not lam > 0:
            raise DomainError('lambda must be positive, got {}'.format(lam))
        t = max(1, int(round(1.0 / lam)))
        if abs(1.0 / t - lam) > 1e-12:
            logger.info('Landweber lambda {} rounded to t = {} (effective lambda {})'.format(lam, t, 1.0 / t))
        return cls(t=t, U=U)

    @property
    def effectiveLambda(self):
        return 1.0 / self.t

    def check(self, lam, u):
        lam, u = super(Landweber, self).check(lam, u)
        if np.any(np.abs(lam - 1.0 / self.t) > 1e-12):
            raise InconsistencyError('Landweber with t = {} needs lambda = 1/t, got {}'.format(self.t, lam))
        return lam, u

    def g(self, lam, u):
        u = np.asarray(u, dtype=float)
        big = u > 1e-12
        safe = np.where(big, u, 1.0)
        # (1 - (1-u)**t)/u, written to stay accurate for small u
        with np.errstate(divide='ignore'):
            closed = -np.expm1(self.t * np.log1p(-safe)) / safe
        return np.where(big, closed, float(self.t))

    def residual(self, lam, u):
        lam, u = self.check(lam, u)
        return (1.0 - u) ** self.t

    def scaledLambda(self, lam, rescale):
        # the rescaled problem defines the algorithm, so lambda stays 1/t
        return lam

    def gamma(self, nu):
        self.checkNu(nu)
        return landweberGamma(self.t, float(nu))

    @property
    def code(self):
        return 'landweber({})'.format(self.t)

    @property
    def inputs(self):
        return dict(kind=self.name, t=self.t)


def makeFilter(**kwargs):
    """use keywords to select a kind of Filter and construct it"""
    kind = kwargs.get('kind', 'tikhonov').lower()
    U = kwargs.get('U', 1.0)
    if kind == 'tikhonov':
        return Tikhonov(U=U)
    elif kind == 'cutoff':
        return SpectralCutoff(U=U)
    elif kind == 'landweber':
        t = kwargs.get('t')
        if t is None:
            raise ContractViolation('a Landweber filter needs t (or use Landweber.fromLambda)')
        return Landweber(t=t, U=U)
    else:
        raise ContractViolation('unknown filter kind "{}"'.format(kind))


def apply_filter(filter, lam, u):
    """Return g_lambda(u) for a filter."""
    return filter.apply(lam, u)


def filter_constants(filter, nus=default_nus):
    """Return (b, qualification, gamma_table) for a filter."""
    return filter.constants(nus)


def verify_filter_conditions(filter, lambda_grid, u_grid, nu_list):
    """Check the filter conditions at every grid point.

    Returns a report dictionary with the worst-case ratio (lhs/rhs) per lambda
    for |g| <= b/lambda, |g u| <= b and, for each nu within the qualification,
    |1 - g u| u**nu <= gamma_nu lambda**nu. report['passed'] is True iff every
    ratio is <= 1 + tolerance (and g u >= 0). For a Landweber filter each lambda
    is rounded onto its own t = round(1/lambda)."""
    lambdas = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    if lambdas.size == 0 or u.size == 0:
        raise ContractViolation('the lambda and u grids must be nonempty')
    filter.check(filter.U, u)
    if np.any(lambdas <= 0) or np.any(lambdas > filter.U) or not np.all(np.isfinite(lambdas)):
        raise DomainError('lambda grid must lie in (0, {}]'.format(filter.U))

    nus = [float(nu) for nu in nu_list if 0 < nu <= filter.qualification]
    excluded = [float(nu) for nu in nu_list if not 0 < nu <= filter.qualification]
    notes = []
    if excluded:
        notes.append('nu = {} exceed the qualification {} of {} and were not checked'.format(
            excluded, filter.qualification, filter.code))

    report = dict(filter=filter.code, lambdas=[], bound=[], product=[], nonnegative=True,
                  residual={nu: [] for nu in nus}, excluded=excluded, notes=notes)
    for lam in lambdas:
        if isinstance(filter, Landweber):
            this = Landweber.fromLambda(lam, U=filter.U)
            lam = this.effectiveLambda
        else:
            this = filter
        g = this.g(lam, u)
        product = g * u
        report['lambdas'].append(lam)
        report['bound'].append(np.max(np.abs(g)) * lam / this.b)
        report['product'].append(np.max(np.abs(product)) / this.b)
        report['nonnegative'] &= bool(np.all(product >= -tolerance))
        for nu in nus:
            lhs = np.abs(this.residual(lam, u)) * u ** nu
            report['residual'][nu].append(np.max(lhs) / (this.gamma(nu) * lam ** nu))

    worst = max(report['bound'] + report['product'] + [max(v) for v in report['residual'].values()] + [0.0])
    report['worst'] = worst
    report['passed'] = bool(worst <= 1 + tolerance and report['nonnegative'])
    logger.info('{} filter conditions on {} lambdas x {} points: worst ratio {:.6f}, {}'.format(
        filter.code, len(lambdas), len(u), worst, {True: 'passed', False: 'FAILED'}[report['passed']]))
    return report
