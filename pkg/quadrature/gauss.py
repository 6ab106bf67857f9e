# -*- coding: utf-8 -*-

import functools
import logging

import numpy as np

log = logging.getLogger(__name__)

MAX_ORDER = 64
NEWTON_TOL = 1e-15
NEWTON_MAX_ITER = 100


class QuadratureBaseError(Exception):
    """ Base quadrature exception. """
    pass


class QuadratureOrderError(QuadratureBaseError):
    """ Raised for a quadrature order outside the supported range. """
    pass


class UnsupportedCaseError(QuadratureBaseError):
    """ Raised for an unsupported case/kernel combination. """
    pass


class QuadratureRule(object):
    """
    Gauss-Legendre rule on (0, 1).
    """
    __slots__ = ('_nodes', '_weights')

    def __init__(self, nodes, weights):
        self._nodes = np.asarray(nodes, dtype=float)
        self._weights = np.asarray(weights, dtype=float)
        self._nodes.setflags(write=False)
        self._weights.setflags(write=False)

    @property
    def order(self):
        return len(self._nodes)

    @property
    def nodes(self):
        return self._nodes

    @property
    def weights(self):
        return self._weights

    def integrate(self, func):
        """
        Apply the rule to a vectorised function on (0, 1).

        :param func: Callable taking an array of nodes.
        :rtype: float
        """
        return float(np.dot(self._weights, func(self._nodes)))

    def on(self, a, b):
        """
        The same rule mapped to (a, b).

        :rtype: QuadratureRule
        """
        return QuadratureRule(a + (b - a) * self._nodes, (b - a) * self._weights)

    def tensor(self, dim):
        """
        Tensor product points and weights on the unit cube.

        :param dim: Number of dimensions.
        :type dim: int
        :return: Points of shape (order**dim, dim) and their weights.
        :rtype: tuple
        """
        grids = np.meshgrid(*([self._nodes] * dim), indexing='ij')
        wgrids = np.meshgrid(*([self._weights] * dim), indexing='ij')
        points = np.stack([g.ravel() for g in grids], axis=1)
        weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        return points, weights

    def __repr__(self):
        return 'QuadratureRule(order=%s)' % self.order


@functools.lru_cache(maxsize=None)
def gauss_legendre(n):
    """
    Gauss-Legendre nodes and weights on (0, 1).

    The roots of the Legendre polynomial P_n are found by Newton
    iteration from Chebyshev-like initial guesses, then mapped from
    (-1, 1) to (0, 1).

    :param n: Number of nodes, 1..64.
    :type n: int
    :rtype: QuadratureRule
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_ORDER:
        raise QuadratureOrderError('quadrature order must be in 1..%s, got %r' % (MAX_ORDER, n))

    x = np.cos(np.pi * (np.arange(n) + 0.75) / (n + 0.5))
    for _ in range(NEWTON_MAX_ITER):
        p_n, dp_n = _legendre(n, x)
        dx = p_n / dp_n
        x = x - dx
        if np.max(np.abs(dx)) < NEWTON_TOL:
            break
    else:
        log.warning('Newton iteration for order %s stopped at |dx|=%.3e' % (n, np.max(np.abs(dx))))

    _, dp_n = _legendre(n, x)
    weights = 2.0 / ((1.0 - x * x) * dp_n * dp_n)

    # x is descending, so (1 - x)/2 is ascending
    return QuadratureRule((1.0 - x) / 2.0, weights / 2.0)


def _legendre(n, x):
    """ P_n(x) and P_n'(x) by the three term recurrence. """
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def split_rule(n, split=0.5):
    """
    Composite rule: the order-n rule on (0, split) and on (split, 1).

    :param n: Order of each panel.
    :type n: int
    :param split: Panel boundary.
    :type split: float
    :rtype: QuadratureRule
    """
    base = gauss_legendre(n)
    left = base.on(0.0, split)
    right = base.on(split, 1.0)
    return QuadratureRule(np.concatenate([left.nodes, right.nodes]),
                          np.concatenate([left.weights, right.weights]))
