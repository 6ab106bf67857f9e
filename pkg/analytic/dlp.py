# -*- coding: utf-8 -*-

"""
Semi-analytical double layer potential pair integrals.

Every pair integral reduces to one dimensional integrals of smooth
functions

    h(x) = P(x) / (d (d0 + d1 x + x^2) sqrt(q) sqrt(q0 + q1 x + x^2))

with a cubic P. They are integrated in closed form after splitting the
rational part and substituting a Moebius map that separates the two
quadratics. Delicate configurations fall back to Gauss quadrature of h.
"""

import logging

import numpy as np

from analytic.errors import (InvalidArgumentsError, DegenerateConfigurationError,
                             FallbackRequired, first_index)
from analytic.tally import TALLY, ANTIDERIVATIVE, FALLBACK
from analytic.dlp_rows import load_rows, row_coefficients
from quadrature.gauss import gauss_legendre, split_rule

log = logging.getLogger(__name__)

FALLBACK_ORDER = 32
COPLANAR_TOL = 1e-14
ROOT_LIMIT = 1e8

EDGE_TERMS = (1, 2, 3, 4, 5)

# symbols of dlp_rows.txt holding 3D vectors
VECTOR_SYMBOLS = frozenset(['u', 'v', 'w', 'u1', 'u2', 'v1', 'v2', 'vq', 'uq', 'U'])


def _dot(a, b):
    return np.einsum('...i,...i->...', a, b)


def _norm(a):
    return np.sqrt(_dot(a, a))


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


class EdgeKernelParams(object):
    """
    Coefficients of h(x). All entries broadcast to a common batch shape.
    """

    FIELDS = ('q', 'q0', 'q1', 'd', 'd0', 'd1', 'p0', 'p1', 'p2', 'p3')

    def __init__(self, q, q0, q1, d, d0, d1, p0, p1, p2, p3):
        values = np.broadcast_arrays(*[np.asarray(z, dtype=float)
                                       for z in (q, q0, q1, d, d0, d1, p0, p1, p2, p3)])
        for name, value in zip(self.FIELDS, values):
            setattr(self, name, value)

    @classmethod
    def from_dict(cls, coefficients):
        return cls(**coefficients)

    @property
    def shape(self):
        return self.q.shape

    def subset(self, mask):
        """ Params of the masked entries, flattened. """
        return EdgeKernelParams(*[getattr(self, name)[mask] for name in self.FIELDS])

    def h(self, x):
        """
        Evaluate h at point(s) x; x broadcasts against a new trailing axis.

        :param x: 1D points.
        :rtype: numpy.ndarray
        """
        x = np.asarray(x, dtype=float)
        exp = [getattr(self, name)[..., None] for name in self.FIELDS]
        q, q0, q1, d, d0, d1, p0, p1, p2, p3 = exp
        numerator = p0 + x * (p1 + x * (p2 + x * p3))
        return numerator / (d * (d0 + d1 * x + x * x) * np.sqrt(q) * np.sqrt(q0 + q1 * x + x * x))


def _g_values(rho, s):
    sqrt_rho = np.sqrt(np.abs(rho))
    with np.errstate(all='ignore'):
        positive = np.arctan(s / sqrt_rho) / sqrt_rho
        zero = -1.0 / s
        negative = np.log(np.abs((s - sqrt_rho) / (s + sqrt_rho))) / (2.0 * sqrt_rho)
    return np.where(rho > 0, positive, np.where(rho == 0, zero, negative))


def g_branch(rho, s):
    """
    Antiderivative of 1/(rho + s^2):

        arctan(s/sqrt(rho))/sqrt(rho)                          rho > 0
        -1/s                                                   rho = 0
        ln|(s - sqrt(-rho))/(s + sqrt(-rho))|/(2 sqrt(-rho))   rho < 0

    :rtype: float | numpy.ndarray
    """
    rho, s = np.broadcast_arrays(np.asarray(rho, dtype=float), np.asarray(s, dtype=float))
    pole = ((rho == 0) & (s == 0)) | ((rho < 0) & (np.abs(s) == np.sqrt(np.abs(rho))))
    if pole.any():
        raise DegenerateConfigurationError('G evaluated at its pole', first_index(pole))
    return _out(_g_values(rho, s))


def _g_infinity(rho):
    with np.errstate(all='ignore'):
        return np.where(rho > 0, np.pi / (2.0 * np.sqrt(np.abs(rho))), 0.0)


def _dlp_h_values(params):
    """
    Closed form int_0^1 h(x) dx for a batch.

    :return: Values and the mask of entries that need the fallback.
    :rtype: tuple
    """
    q, q0, q1 = params.q, params.q0, params.q1
    d, d0, d1 = params.d, params.d0, params.d1
    p0, p1, p2, p3 = params.p0, params.p1, params.p2, params.p3

    with np.errstate(all='ignore'):
        scale = 1.0 / (d * np.sqrt(q))

        def radicand(x):
            return q0 + q1 * x + x * x

        def radical_log(x):
            # ln(2 sqrt(Q) + 2 x + q1) without cancellation
            shift = x + 0.5 * q1
            delta = np.maximum(q0 - 0.25 * q1 * q1, 0.0)
            root = np.sqrt(np.maximum(radicand(x), 0.0))
            return np.log(2.0 * np.where(shift >= 0, root + shift, delta / (root - shift)))

        k = p2 - d1 * p3 - 0.5 * p3 * q1
        polynomial_part = scale * (p3 * np.sqrt(radicand(1.0)) + k * radical_log(1.0) -
                                   p3 * np.sqrt(radicand(0.0)) - k * radical_log(0.0))

        # remainder (n + m x)/(D(x) sqrt(Q(x)))
        n = p0 - d0 * p2 + d0 * d1 * p3
        m = p1 - d1 * p2 - d0 * p3 + d1 * d1 * p3

        qa = d1 - q1
        qb = 2.0 * (d0 - q0)
        qc = q1 * d0 - d1 * q0
        disc = qb * qb - 4.0 * qa * qc
        sqrt_disc = np.sqrt(np.maximum(disc, 0.0))
        half = -0.5 * (qb + np.where(qb >= 0, 1.0, -1.0) * sqrt_disc)
        z1 = half / qa
        z2 = qc / half
        mu = np.maximum(z1, z2)
        nu = np.minimum(z1, z2)

        d_mu = mu * mu + d1 * mu + d0
        d_nu = nu * nu + d1 * nu + d0
        q_mu = radicand(mu)
        q_nu = radicand(nu)
        omega = (mu - nu) / (d_mu * np.sqrt(q_mu))
        lam = d_nu / d_mu
        kappa = q_nu / q_mu

        coef_a = (n + m * nu) / (kappa - lam)
        coef_b = n + m * mu
        rho_a = lam / (kappa - lam)
        rho_b = lam - kappa

        def h_moebius(t, sign):
            root = np.sqrt(kappa + t * t)
            return omega * sign * (coef_a * _g_values(rho_a, t / root) +
                                   coef_b * _g_values(rho_b, root))

        def h_infinity(sign):
            return omega * sign * (coef_a * _g_values(rho_a, sign) + coef_b * _g_infinity(rho_b))

        t_start = -nu / mu
        t_end = (1.0 - nu) / (mu - 1.0)
        split = (mu > 0.0) & (mu < 1.0)
        sign = np.where(mu > 1.0, 1.0, -1.0)
        whole = h_moebius(t_end, sign) - h_moebius(t_start, sign)
        pieces = (h_infinity(1.0) - h_moebius(t_start, 1.0)) + \
                 (h_moebius(t_end, -1.0) - h_infinity(-1.0))
        rational_part = scale * np.where(split, pieces, whole)
        values = polynomial_part + rational_part

        x_min = np.clip(-0.5 * d1, 0.0, 1.0)
        d_min = d0 + d1 * x_min + x_min * x_min
        rational_zero = (n == 0) & (m == 0)
        delicate = (
            (np.abs(mu) > ROOT_LIMIT) | (np.abs(nu) > ROOT_LIMIT) |
            ~(disc > 0) | (np.abs(mu - nu) < 1e-8 * (1.0 + np.abs(mu) + np.abs(nu))) |
            (np.abs(mu) < 1e-10) | (np.abs(mu - 1.0) < 1e-10) |
            ~(d_mu > 1e-300) | ~(lam > 1e-12) |
            (np.abs(kappa - lam) < 1e-10 * np.maximum(kappa, lam)))
        delicate = delicate & ~rational_zero
        values = np.where(rational_zero, polynomial_part, values)
        unstable = delicate | (d_min < 1e-12 * (np.abs(d0) + np.abs(d1) + 1.0)) | ~np.isfinite(values)

    return values, unstable


def dlp_h_integral(params):
    """
    int_0^1 h(x) dx in closed form.

    :param params: The coefficients of h, with q > 0 and d > 0.
    :type params: EdgeKernelParams
    :rtype: float | numpy.ndarray
    """
    if np.any(~(params.q > 0)) or np.any(~(params.d > 0)):
        raise InvalidArgumentsError('h needs q > 0 and d > 0')
    values, unstable = _dlp_h_values(params)
    if unstable.any():
        raise FallbackRequired(unstable)
    return _out(values)


def dlp_h_numeric(params, order=None):
    """
    int_0^1 h(x) dx by composite Gauss-Legendre quadrature.

    :param order: Points per half interval, FALLBACK_ORDER when None.
    :rtype: float | numpy.ndarray
    """
    rule = split_rule(FALLBACK_ORDER if order is None else order)
    return _out(params.h(rule.nodes) @ rule.weights)


def _inner(case, term, env):
    """
    Inner integral of a row, integrated over x: int h1 - int h0.
    Entries of env are flattened batches of equal length.
    """
    row = load_rows()[(case, term)]
    high = EdgeKernelParams.from_dict(row_coefficients(row, 1, env))
    low = EdgeKernelParams.from_dict(row_coefficients(row, 0, env))
    # both endpoints share D, so they fall back together
    high_values, high_unstable = _dlp_h_values(high)
    low_values, low_unstable = _dlp_h_values(low)
    unstable = high_unstable | low_unstable
    values = high_values - low_values
    if unstable.any():
        count = int(unstable.sum())
        log.debug('%s row %s: fallback for %s of %s entries' % (case, term, count, unstable.size))
        TALLY.add(FALLBACK, count)
        values = np.array(values, copy=True)
        values[unstable] = (dlp_h_numeric(high.subset(unstable)) -
                            dlp_h_numeric(low.subset(unstable)))
    if not np.all(np.isfinite(values)):
        raise DegenerateConfigurationError('%s row %s is not finite' % (case, term),
                                           first_index(~np.isfinite(values)))
    return values


def _masked_env(env, shape, mask):
    out = {}
    for name, value in env.items():
        value = np.asarray(value, dtype=float)
        if name in VECTOR_SYMBOLS:
            out[name] = np.broadcast_to(value, shape + (3,))[mask]
        else:
            out[name] = np.broadcast_to(value, shape)[mask]
    return out


def _split_coeffs(coeffs):
    """ (a0, a1, a2) of phi = a0 + a1 y1 + a2 y2 on tau. """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1:] != (3,):
        raise InvalidArgumentsError('coefficients need a trailing axis of length 3')
    if not np.all(np.isfinite(coeffs)):
        raise InvalidArgumentsError('coefficients must be finite')
    return coeffs[..., 0], coeffs[..., 1], coeffs[..., 2]


class DlpCoefficients(object):
    """
    The trial function after integrating out the radial variable.
    """

    def __init__(self, c0, c1, c2):
        self.c0 = c0
        self.c1 = c1
        self.c2 = c2

    @classmethod
    def for_edge(cls, coeffs):
        a0, a1, a2 = _split_coeffs(coeffs)
        return cls(a0 / 2.0 + a1 / 3.0, -a1 / 6.0, a2 / 6.0)

    @classmethod
    def for_vertex(cls, coeffs):
        a0, a1, a2 = _split_coeffs(coeffs)
        return cls(a0 / 2.0, a1 / 3.0, a2 / 3.0)


def dlp_edge(u, v, w, normal, coeffs, gram_sigma, gram_tau):
    """
    DLP integral of two triangles sharing the edge v.

    tau is p + y1 v + y2 u, sigma is p + x1 v + x2 w and the normal is
    the one of tau. Coplanar pairs give 0.

    :param coeffs: (a0, a1, a2) of the trial function, broadcastable.
    :rtype: float | numpy.ndarray
    """
    u, v, w, normal = np.broadcast_arrays(*[np.asarray(z, dtype=float) for z in (u, v, w, normal)])
    c = DlpCoefficients.for_edge(coeffs)
    c0, c1, c2 = c.c0, c.c1, c.c2

    w_normal = _dot(w, normal)
    shape = np.broadcast_shapes(w_normal.shape, np.shape(c0))
    active = np.broadcast_to(np.abs(w_normal) >= COPLANAR_TOL * _norm(w), shape)

    total = np.zeros(shape)
    if active.any():
        env = _masked_env(dict(u=u, v=v, w=w, c0=c0, c1=c1, c2=c2), shape, active)
        inner = sum(_inner('edge', term, env) for term in EDGE_TERMS)
        TALLY.add(ANTIDERIVATIVE, inner.size)
        total[active] = inner * np.broadcast_to(w_normal, shape)[active]

    return _out(np.asarray(gram_sigma) * gram_tau / (4.0 * np.pi) * total)


def dlp_vertex(u1, u2, v1, v2, normal, coeffs, gram_sigma, gram_tau, order):
    """
    DLP integral of two triangles sharing the vertex p.

    tau is p + y1 u1 + y2 u2, sigma is p + x1 v1 + x2 v2 and the normal is
    the one of tau. The outer integral runs over `order` Gauss-Legendre nodes.

    :rtype: float | numpy.ndarray
    """
    u1, u2, v1, v2, normal = np.broadcast_arrays(*[np.asarray(z, dtype=float)
                                                   for z in (u1, u2, v1, v2, normal)])
    c = DlpCoefficients.for_vertex(coeffs)
    c0, c1, c2 = c.c0, c.c1, c.c2

    rule = gauss_legendre(order)
    eta = rule.nodes
    batch = np.broadcast_shapes(u1.shape[:-1], np.shape(c0))
    shape = batch + (order,)

    def nodes(z):
        return z[..., None, :]

    def scalars(z):
        return np.asarray(z)[..., None]

    # sigma point moves along v(eta2), tau is integrated analytically
    v_eta = nodes(v1) + eta[:, None] * nodes(v2)
    v_normal = _dot(v_eta, nodes(normal))
    first = np.zeros(shape)
    active = np.broadcast_to(np.abs(v_normal) >= COPLANAR_TOL * _norm(v_eta), shape)
    if active.any():
        env = _masked_env(dict(u1=nodes(u1), u2=nodes(u2), vq=v_eta,
                               c0=scalars(c0), c1=scalars(c1), c2=scalars(c2)), shape, active)
        first[active] = _inner('vertex', 1, env) * np.broadcast_to(v_normal, shape)[active]

    # tau point moves along u(eta2), sigma is integrated analytically
    u_eta = nodes(u1) + eta[:, None] * nodes(u2)
    basis = scalars(c0) + scalars(c1) + scalars(c2) * eta
    v1_normal = _dot(v1, normal)
    v2_normal = _dot(v2, normal)
    second = np.zeros(shape)
    flat = (np.abs(v1_normal) < COPLANAR_TOL * _norm(v1)) & (np.abs(v2_normal) < COPLANAR_TOL * _norm(v2))
    active = np.broadcast_to(~scalars(flat), shape)
    if active.any():
        env = _masked_env(dict(uq=u_eta, v1=nodes(v1), v2=nodes(v2),
                               k1=basis * scalars(v1_normal), k2=basis * scalars(v2_normal)),
                          shape, active)
        second[active] = _inner('vertex', 2, env)

    TALLY.add(ANTIDERIVATIVE, 2 * int(np.prod(shape)))
    total = (first + second) @ rule.weights
    return _out(np.asarray(gram_sigma) * gram_tau / (4.0 * np.pi) * total)


def dlp_farfield_inner(p, u1, u2, v1, v2, normal, order):
    """
    Inner integrals over sigma at the tau quadrature nodes of a disjoint pair.

    They do not depend on the trial function and can be shared between the
    three basis functions of tau.

    :return: (..., order, order) values, axis -2 over eta3 and -1 over eta4.
    :rtype: numpy.ndarray
    """
    p, u1, u2, v1, v2, normal = np.broadcast_arrays(*[np.asarray(z, dtype=float)
                                                      for z in (p, u1, u2, v1, v2, normal)])
    rule = gauss_legendre(order)
    eta3 = rule.nodes[:, None, None]
    eta4 = rule.nodes[None, :, None]

    def nodes(z):
        return z[..., None, None, :]

    point = nodes(p) + eta3 * nodes(u1) + eta3 * eta4 * nodes(u2)
    shape = point.shape[:-1]
    point_normal = _dot(point, nodes(normal))
    v1_normal = _dot(v1, normal)[..., None, None]
    v2_normal = _dot(v2, normal)[..., None, None]

    flat = ((np.abs(point_normal) < COPLANAR_TOL * _norm(point)) &
            (np.abs(v1_normal) < COPLANAR_TOL * _norm(v1)[..., None, None]) &
            (np.abs(v2_normal) < COPLANAR_TOL * _norm(v2)[..., None, None]))
    values = np.zeros(shape)
    active = ~flat
    if active.any():
        env = _masked_env(dict(U=point, v1=nodes(v1), v2=nodes(v2),
                               un=point_normal, v1n=v1_normal, v2n=v2_normal), shape, active)
        values[active] = _inner('far', 1, env)
    TALLY.add(ANTIDERIVATIVE, int(np.prod(shape)))
    return values


def dlp_farfield_combine(inner, coeffs, gram_sigma, gram_tau, order):
    """
    Outer quadrature of dlp_farfield_inner values for trial coefficients.

    :rtype: float | numpy.ndarray
    """
    rule = gauss_legendre(order)
    a0, a1, a2 = _split_coeffs(coeffs)
    eta3 = rule.nodes[:, None]
    eta4 = rule.nodes[None, :]
    weights = np.outer(rule.weights, rule.weights) * eta3

    def nodes(z):
        return np.asarray(z)[..., None, None]

    phi = nodes(a0) + nodes(a1) * eta3 + nodes(a2) * eta3 * eta4
    total = np.sum(inner * phi * weights, axis=(-2, -1))
    return _out(np.asarray(gram_sigma) * gram_tau / (4.0 * np.pi) * total)


def dlp_farfield(p, u1, u2, v1, v2, normal, coeffs, gram_sigma, gram_tau, order):
    """
    DLP integral of two disjoint triangles.

    tau is p1 + y1 u1 + y2 u2, sigma is p2 + x1 v1 + x2 v2, p = p1 - p2 and
    the normal is the one of tau.

    :rtype: float | numpy.ndarray
    """
    inner = dlp_farfield_inner(p, u1, u2, v1, v2, normal, order)
    return dlp_farfield_combine(inner, coeffs, gram_sigma, gram_tau, order)
