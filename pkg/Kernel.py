"""Mercer kernels on X = [0,1], their Gram matrices, and the kernel constant kappa."""
import logging

import numpy as np

from .errors import DomainError, ContractViolation
from .settings import log_file_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_file_handler)

# how many points in the grid search for sup_x K(x,x)?
nkappagrid = 10000


def check_points(x):
    """Return x as a float array, making sure it is finite and inside [0,1]."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError('kernel inputs must be finite')
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError('kernel inputs must lie in [0,1], got [{}, {}]'.format(np.min(x), np.max(x)))
    return x


def basis(x, m):
    """Evaluate the first m trigonometric eigenfunctions at x.

    phi_1 = 1, phi_2j = sqrt(2) cos(2 pi j x), phi_2j+1 = sqrt(2) sin(2 pi j x),
    which are orthonormal in L2(Uniform[0,1]). The output has shape x.shape + (m,)."""
    x = np.asarray(x, dtype=float)
    phi = np.empty(x.shape + (m,))
    phi[..., 0] = 1.0
    if m > 1:
        k = np.arange(1, m)
        j = (k + 1) // 2
        angle = 2 * np.pi * x[..., np.newaxis] * j
        phi[..., 1:] = np.where(k % 2 == 1, np.sqrt(2) * np.cos(angle), np.sqrt(2) * np.sin(angle))
    return phi


class GramMatrix(object):
    """The matrix K(points[i], points[j]) (up to 1/n, the realization of S_X S_X^T)."""

    def __init__(self, entries, points):
        self.entries = np.array(entries, dtype=float)
        self.points = np.array(points, dtype=float)
        self.entries.setflags(write=False)
        self.points.setflags(write=False)

    @property
    def n(self):
        return len(self.points)

    def min_eigenvalue(self):
        """Smallest eigenvalue (should be >= -1e-10 * max|entry|)."""
        return np.linalg.eigvalsh(self.entries)[0]

    def __repr__(self):
        return '<{0}x{0} Gram matrix>'.format(self.n)


class Kernel(object):
    """The Kernel class defines the basics of a Mercer kernel on [0,1]:
        evaluation, Gram matrices, cross matrices against anchor points,
        and the constant kappa = sup_x sqrt(K(x,x))."""

    name = 'kernel'

    def __init__(self):
        self._kappa = None

    def pairwise(self, x, xprime):
        """K for every pair of rows (len(x) x len(xprime)); inputs already checked."""
        raise RuntimeError("No implemented for base Kernel class")

    def diagonal(self, x):
        """K(x,x) for every point; inputs already checked."""
        raise RuntimeError("No implemented for base Kernel class")

    def evaluate(self, x, xprime):
        """Return K(x, x') (elementwise, with broadcasting)."""
        raise RuntimeError("No implemented for base Kernel class")

    def cross(self, x, anchors):
        """Return the len(x) x len(anchors) matrix K(x_i, anchors_j)."""
        return self.pairwise(check_points(np.atleast_1d(x)), check_points(np.atleast_1d(anchors)))

    def gram(self, points):
        """Return the GramMatrix of the kernel on some points."""
        points = check_points(np.atleast_1d(points))
        if points.size == 0:
            raise DomainError('a Gram matrix needs at least one point')
        entries = self.pairwise(points, points)
        # symmetrize away round-off
        entries = 0.5 * (entries + entries.T)
        return GramMatrix(entries, points)

    @property
    def kappa(self):
        """kappa = sup_x sqrt(K(x,x)), cached after the first call."""
        if self._kappa is None:
            self._kappa = self.computeKappa()
            logger.debug('kappa for {} is {}'.format(self, self._kappa))
        return self._kappa

    def computeKappa(self):
        raise RuntimeError("No implemented for base Kernel class")

    @property
    def inputs(self):
        """the keyword dictionary that recreates this kernel through makeKernel"""
        raise RuntimeError("No implemented for base Kernel class")

    def __eq__(self, other):
        return isinstance(other, Kernel) and self.inputs == other.inputs

    def __hash__(self):
        return hash(repr(self))

    def __repr__(self):
        return '<{0}>'.format(self.name)


class GaussianRBF(Kernel):
    """K(x,x') = exp(-(x-x')**2/(2 bandwidth**2)), with kappa = 1."""

    name = 'rbf'

    def __init__(self, bandwidth=0.1):
        super(GaussianRBF, self).__init__()
        if not (np.isfinite(bandwidth) and bandwidth > 0):
            raise ContractViolation('the RBF bandwidth must be positive, got {}'.format(bandwidth))
        self.bandwidth = float(bandwidth)

    def pairwise(self, x, xprime):
        d = x[:, np.newaxis] - xprime[np.newaxis, :]
        return np.exp(-0.5 * d ** 2 / self.bandwidth ** 2)

    def evaluate(self, x, xprime):
        x, xprime = np.broadcast_arrays(check_points(x), check_points(xprime))
        values = np.exp(-0.5 * (x - xprime) ** 2 / self.bandwidth ** 2)
        if values.ndim == 0:
            return float(values)
        return values

    def diagonal(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def computeKappa(self):
        return 1.0

    @property
    def inputs(self):
        return dict(kind='rbf', bandwidth=self.bandwidth)

    def __repr__(self):
        return '<GaussianRBF(bandwidth={})>'.format(self.bandwidth)


class TruncatedBasis(Kernel):
    """K(x,x') = sum_k mu_k phi_k(x) phi_k(x') over the trigonometric basis.

    The eigenvalues must be strictly positive and non-increasing. Because the
    phi_k are orthonormal in L2(Uniform[0,1]), (mu_k, phi_k) are exactly the
    eigenpairs of the integral operator L_K with respect to the uniform measure."""

    name = 'truncated'

    def __init__(self, eigenvalues=(1.0,)):
        super(TruncatedBasis, self).__init__()
        mu = np.array(eigenvalues, dtype=float).ravel()
        if mu.size == 0:
            raise ContractViolation('a truncated basis needs at least one eigenvalue')
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise ContractViolation('truncated basis eigenvalues must be finite and strictly positive')
        if np.any(np.diff(mu) > 0):
            raise ContractViolation('truncated basis eigenvalues must be non-increasing')
        mu.setflags(write=False)
        self.eigenvalues = mu
        self.bound = np.sqrt(mu[0] + 2 * np.sum(mu[1:]))

    @property
    def m(self):
        return len(self.eigenvalues)

    def features(self, x):
        """Phi(x) diag(sqrt(mu)), so that K = features features^T."""
        return basis(x, self.m) * np.sqrt(self.eigenvalues)

    def pairwise(self, x, xprime):
        return (basis(x, self.m) * self.eigenvalues).dot(basis(xprime, self.m).T)

    def evaluate(self, x, xprime):
        x, xprime = np.broadcast_arrays(check_points(x), check_points(xprime))
        values = np.sum(basis(x, self.m) * self.eigenvalues * basis(xprime, self.m), axis=-1)
        if values.ndim == 0:
            return float(values)
        return values

    def diagonal(self, x):
        return (basis(x, self.m) ** 2).dot(self.eigenvalues)

    def computeKappa(self):
        grid = np.linspace(0.0, 1.0, nkappagrid)
        # go in chunks, to keep the basis matrix small when m is large
        supremum = 0.0
        for chunk in np.array_split(grid, max(1, self.m * nkappagrid // 2000000)):
            supremum = max(supremum, np.max(self.diagonal(chunk)))
        kappa = np.sqrt(supremum)
        if kappa > self.bound * (1 + 1e-12):
            logger.warning('grid kappa {} exceeds the analytic bound {}'.format(kappa, self.bound))
        return kappa

    @property
    def inputs(self):
        return dict(kind='truncated', eigenvalues=[float(mu) for mu in self.eigenvalues])

    def __repr__(self):
        return '<TruncatedBasis(m={}, mu_1={:.4g}, mu_m={:.4g})>'.format(
            self.m, self.eigenvalues[0], self.eigenvalues[-1])


def makeKernel(**kwargs):
    """use keywords to select a kind of Kernel and construct it"""
    kind = kwargs.get('kind', 'truncated').lower()
    if kind == 'rbf':
        return GaussianRBF(bandwidth=kwargs.get('bandwidth', 0.1))
    elif kind == 'truncated':
        return TruncatedBasis(eigenvalues=kwargs['eigenvalues'])
    else:
        raise ContractViolation('unknown kernel kind "{}"'.format(kind))


def eval_kernel(spec, x, xprime):
    """Return K(x, x')."""
    return spec.evaluate(x, xprime)


def gram_matrix(spec, points):
    """Return the GramMatrix K(points[i], points[j])."""
    return spec.gram(points)


def kappa(spec):
    """Return sup_x sqrt(K(x,x))."""
    return spec.kappa
