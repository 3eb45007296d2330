"""Weighted spectral estimators, f = g_lambda(S_X^T W S_X) S_X^T W y.

The operator g_lambda(S_X^T W S_X) on the RKHS is never formed. With
B = S_X^T W^(1/2) and C = W^(1/2) S_X, g(BC)B = B g(CB), and CB is the
symmetric n x n matrix

    M = (1/n) diag(s) K diag(s),    s_i = sqrt(effective weight_i),

so the estimator is f(x) = (1/n) sum_i s_i c_i K(x, x_i) with c = g_lambda(M)(s * y).
M is rescaled by rho = kappa**2 max(weight) so its spectrum lies in [0,1],
the domain of every filter (and the region where Landweber converges)."""
import json
import logging

import numpy as np
import scipy.linalg

from . import Kernel
from .Filter import Landweber
from .Shift import Unweighted
from .errors import ContractViolation, DegenerateInput, NumericError, PSDViolation, DivergenceError
from .settings import log_file_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# eigenvalues of the rescaled M below -psdtolerance are an error, above it they are round-off
psdtolerance = 1e-8

# predictions are made in chunks of this many points
chunksize = 4096


class Dataset(object):
    """Training samples z = {(x_i, y_i)}, along with the density ratios w(x_i)."""

    def __init__(self, x, y, raw_weights=None):
        self.x = np.atleast_1d(np.array(x, dtype=float))
        self.y = np.atleast_1d(np.array(y, dtype=float))
        if raw_weights is None:
            raw_weights = np.ones_like(self.x)
        self.raw_weights = np.atleast_1d(np.array(raw_weights, dtype=float))
        if self.x.ndim != 1 or self.x.shape != self.y.shape or self.x.shape != self.raw_weights.shape:
            raise ContractViolation('x, y and the weights must be vectors of the same length')
        if self.n < 1:
            raise ContractViolation('a dataset needs at least one sample')
        if not np.all(np.isfinite(self.y)):
            raise ContractViolation('labels must be finite')
        if not np.all(np.isfinite(self.raw_weights)) or np.any(self.raw_weights < 0):
            raise ContractViolation('weights must be finite and nonnegative')
        for a in (self.x, self.y, self.raw_weights):
            a.setflags(write=False)

    @property
    def n(self):
        return len(self.x)

    def withLabels(self, y):
        """the same inputs and weights, with other labels"""
        return Dataset(self.x, y, self.raw_weights)

    def __repr__(self):
        return '<Dataset of {} samples>'.format(self.n)


class SpectralEstimator(object):
    """A fitted estimator, f(x) = (1/n) sum_i s_i c_i K(x, anchors_i)."""

    def __init__(self, anchors, sqrt_weights, coefficients, kernel, rescale, lambda_effective,
                 filter='', scheme=''):
        self.anchors = np.array(anchors, dtype=float)
        self.sqrt_weights = np.array(sqrt_weights, dtype=float)
        self.coefficients = np.array(coefficients, dtype=float)
        for a in (self.anchors, self.sqrt_weights, self.coefficients):
            a.setflags(write=False)
        self.kernel = kernel
        self.rescale = float(rescale)
        self.lambda_effective = float(lambda_effective)
        self.filter = filter
        self.scheme = scheme

    @property
    def n(self):
        return len(self.anchors)

    @property
    def dual(self):
        """the vector (1/n) s_i c_i that multiplies K(x, anchors_i)"""
        return self.sqrt_weights * self.coefficients / self.n

    def basisCoefficients(self):
        """For a TruncatedBasis kernel, the coefficients beta_k of f = sum_k beta_k phi_k."""
        if not isinstance(self.kernel, Kernel.TruncatedBasis):
            raise ContractViolation('basis coefficients need a TruncatedBasis kernel, not {}'.format(self.kernel))
        phi = Kernel.basis(self.anchors, self.kernel.m)
        return self.kernel.eigenvalues * phi.T.dot(self.dual)

    def predict(self, x):
        """Evaluate the estimator at one point or an array of points."""
        scalar = np.ndim(x) == 0
        x = Kernel.check_points(np.atleast_1d(x))
        values = np.empty(x.shape)
        if isinstance(self.kernel, Kernel.TruncatedBasis):
            beta = self.basisCoefficients()
            for start in range(0, len(x), chunksize):
                values[start:start + chunksize] = Kernel.basis(x[start:start + chunksize], self.kernel.m).dot(beta)
        else:
            dual = self.dual
            for start in range(0, len(x), chunksize):
                values[start:start + chunksize] = self.kernel.cross(x[start:start + chunksize], self.anchors).dot(dual)
        if scalar:
            return float(values[0])
        return values

    @property
    def inputs(self):
        """a JSON-able dictionary that recreates this estimator"""
        return dict(anchors=self.anchors.tolist(),
                    sqrt_weights=self.sqrt_weights.tolist(),
                    coefficients=self.coefficients.tolist(),
                    kernel=self.kernel.inputs,
                    rescale=self.rescale,
                    lambda_effective=self.lambda_effective,
                    filter=self.filter,
                    scheme=self.scheme)

    def __repr__(self):
        return '<SpectralEstimator({}, {}, lambda={:.4g}, n={})>'.format(
            self.filter, self.scheme, self.lambda_effective, self.n)


def prepare(data, kernel, scheme):
    """Effective weights, their square roots, and the rescale factor rho."""
    v = scheme.effective(data.raw_weights)
    vmax = np.max(v)
    if not vmax > 0:
        raise DegenerateInput('every effective weight is zero')
    rescale = kernel.kappa ** 2 * vmax
    return v, np.sqrt(v), rescale


def spectrum(data, kernel, s, rescale):
    """Eigenvalues theta (in [0,1]) and eigenvectors Q of M/rho, plus whether Q spans everything.

    For a TruncatedBasis kernel with m < n, M/rho = A A^T with A the n x m
    matrix diag(s) Phi diag(sqrt(mu))/sqrt(n rho); the thin SVD of A then gives
    the nonzero spectrum, and the rest of R^n is the null space."""
    n = data.n
    try:
        if isinstance(kernel, Kernel.TruncatedBasis) and kernel.m < n:
            A = kernel.features(data.x) * (s / np.sqrt(n * rescale))[:, np.newaxis]
            Q, sigma, _ = scipy.linalg.svd(A, full_matrices=False)
            theta, complete = sigma ** 2, False
        else:
            K = kernel.gram(data.x).entries
            M = s[:, np.newaxis] * K * s[np.newaxis, :] / n / rescale
            theta, Q = scipy.linalg.eigh(M)
            complete = True
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericError('eigendecomposition failed: {}'.format(e))
    if np.min(theta) < -psdtolerance:
        raise PSDViolation('M has an eigenvalue {} below -{}'.format(np.min(theta), psdtolerance))
    if np.max(theta) > 1 + psdtolerance:
        raise NumericError('the rescaled spectrum reaches {} > 1; kappa or the weights are wrong'.format(
            np.max(theta)))
    logger.debug('rescaled spectrum in [{:.3g}, {:.3g}], rho = {:.4g}'.format(np.min(theta), np.max(theta), rescale))
    return np.clip(theta, 0.0, 1.0), Q, complete


def fit(data, kernel, filter, lam, scheme=None):
    """Fit the weighted spectral estimator for any filter and weighting scheme.

    lambda must lie in (0, U rho]; for a Landweber filter it must equal 1/t."""
    scheme = Unweighted() if scheme is None else scheme
    v, s, rescale = prepare(data, kernel, scheme)
    if isinstance(filter, Landweber):
        filter.check(lam, 0.0)
    scaled = filter.scaledLambda(lam, rescale)
    if not 0 < scaled <= filter.U:
        raise ContractViolation('lambda = {} lies outside (0, U rho] = (0, {}]'.format(lam, filter.U * rescale))

    theta, Q, complete = spectrum(data, kernel, s, rescale)
    z = s * data.y
    projected = Q.T.dot(z)
    c = Q.dot(filter.apply(scaled, theta) * projected)
    if not complete:
        # the null space of M is where the filter sees u = 0
        c += filter.apply(scaled, 0.0) * (z - Q.dot(projected))
    c /= rescale

    logger.info('fitted {} with {} weights on {} samples (lambda = {:.4g}, rho = {:.4g})'.format(
        filter.code, scheme.code, data.n, lam, rescale))
    return SpectralEstimator(data.x, s, c, kernel, rescale, lam, filter=filter.code, scheme=scheme.code)


def predict(est, x):
    """Evaluate a fitted estimator at x."""
    return est.predict(x)


def fit_landweber_iterative(data, kernel, t, scheme=None, blowup=1e12):
    """Run t explicit gradient steps a <- a + eta (s*y - M a), eta = 1/rho, from a = 0.

    Agrees with fit(..., Landweber(t), 1/t, scheme) up to round-off."""
    if int(t) != t or t < 1:
        raise ContractViolation('the number of Landweber steps must be a positive integer, got {}'.format(t))
    scheme = Unweighted() if scheme is None else scheme
    v, s, rescale = prepare(data, kernel, scheme)
    n = data.n

    if isinstance(kernel, Kernel.TruncatedBasis) and kernel.m < n:
        F = kernel.features(data.x)

        def M(a):
            return s * F.dot(F.T.dot(s * a)) / n
    else:
        K = kernel.gram(data.x).entries

        def M(a):
            return s * K.dot(s * a) / n

    z = s * data.y
    eta = 1.0 / rescale
    a = np.zeros(n)
    for k in range(int(t)):
        a = a + eta * (z - M(a))
        if np.linalg.norm(a) > blowup:
            raise DivergenceError('Landweber iterate exploded at step {} (|a| = {:.3g})'.format(k + 1,
                                                                                             np.linalg.norm(a)))
    logger.info('ran {} Landweber steps with {} weights on {} samples'.format(t, scheme.code, n))
    return SpectralEstimator(data.x, s, a, kernel, rescale, 1.0 / t,
                             filter='landweber({})'.format(int(t)), scheme=scheme.code)


def save_model(est, filename):
    """Write a fitted estimator to a JSON text file."""
    with open(filename, 'w') as f:
        json.dump(est.inputs, f, indent=1)
        f.write('\n')
    logger.info('wrote {} to {}'.format(est, filename))


def load_model(filename):
    """Read a fitted estimator written by save_model."""
    with open(filename) as f:
        d = json.load(f)
    try:
        kernel = Kernel.makeKernel(**d['kernel'])
        return SpectralEstimator(d['anchors'], d['sqrt_weights'], d['coefficients'], kernel,
                                 d['rescale'], d['lambda_effective'],
                                 filter=d.get('filter', ''), scheme=d.get('scheme', ''))
    except KeyError as e:
        raise ContractViolation('model file {} is missing {}'.format(filename, e))
