# -*- coding: utf-8 -*-

"""
Semi-analytical single layer potential pair integrals.

All routines accept vectors with a trailing axis of length 3 and any
broadcastable leading batch shape. Scalar inputs give a float.

Identical and shared-edge pairs are integrated in closed form, shared
vertices with a one dimensional rule and disjoint pairs with a two
dimensional rule over closed form inner integrals.
"""

import logging

import numpy as np

from analytic.errors import (InvalidArgumentsError, DegenerateConfigurationError,
                             FallbackRequired, first_index)
from analytic.tally import TALLY, ANTIDERIVATIVE, FALLBACK
from quadrature.gauss import gauss_legendre, split_rule

log = logging.getLogger(__name__)

FALLBACK_ORDER = 32
Q_TOL = 1e-10
D_TOL = 1e-12
LOG_FLOOR = 1e-300

EDGE1 = 'edge1'
EDGEJ = 'edgej'


def _dot(a, b):
    return np.einsum('...i,...i->...', a, b)


def _norm(a):
    return np.sqrt(_dot(a, a))


def _broadcast(*vectors):
    vectors = [np.asarray(z, dtype=float) for z in vectors]
    return np.broadcast_arrays(*vectors)


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


class QuadraticRadical(object):
    """
    The radicand gamma + beta x + alpha x^2 with alpha > 0 and
    4 alpha gamma - beta^2 >= 0.
    """

    def __init__(self, alpha, beta, gamma):
        self.alpha = np.asarray(alpha, dtype=float)
        self.beta = np.asarray(beta, dtype=float)
        self.gamma = np.asarray(gamma, dtype=float)

        if np.any(~(self.alpha > 0)):
            raise InvalidArgumentsError('alpha must be positive')
        scale = self.beta * self.beta + np.abs(self.alpha * self.gamma)
        if np.any(self.discriminant < -1e-14 * scale):
            raise InvalidArgumentsError('radicand changes sign, 4 alpha gamma - beta^2 < 0')

    @property
    def discriminant(self):
        return 4.0 * self.alpha * self.gamma - self.beta * self.beta


def _radical_log(alpha, beta, gamma, x):
    sqrt_alpha = np.sqrt(alpha)
    root = np.sqrt(np.maximum(gamma + beta * x + alpha * x * x, 0.0))
    slope = 2.0 * alpha * x + beta
    delta = np.maximum(4.0 * alpha * gamma - beta * beta, 0.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        # for negative slope the sum cancels; use (sum)(difference) = delta
        arg = np.where(slope >= 0, 2.0 * sqrt_alpha * root + slope,
                       delta / (2.0 * sqrt_alpha * root - slope))
    bad = ~(arg > LOG_FLOOR)
    if bad.any():
        raise DegenerateConfigurationError('non-positive log argument in F', first_index(bad))
    return np.log(arg) / sqrt_alpha


def antiderivative_F(qr, x):
    """
    F(x) = ln(2 sqrt(alpha) sqrt(gamma + beta x + alpha x^2) + 2 alpha x + beta)/sqrt(alpha).

    :param qr: The radicand parameters.
    :type qr: QuadraticRadical
    :param x: Evaluation point(s).
    :rtype: float | numpy.ndarray
    """
    return _out(_radical_log(qr.alpha, qr.beta, qr.gamma, np.asarray(x, dtype=float)))


def _slp_identical(v, w, gram):
    rows = ((_dot(v, v), 2.0 * _dot(v, w), _dot(w, w)),
            (_dot(w, w), 2.0 * _dot(w, v), _dot(v, v)),
            (_dot(w + v, w + v), -2.0 * _dot(w + v, w), _dot(w, w)))
    total = 0.0
    for alpha, beta, gamma in rows:
        total = total + _radical_log(alpha, beta, gamma, 1.0) - _radical_log(alpha, beta, gamma, 0.0)
    return gram * gram / (12.0 * np.pi) * total


def slp_identical(geom):
    """
    Exact SLP integral of a triangle with itself.

    :param geom: The triangle.
    :type geom: TriangleGeometry
    :rtype: float
    """
    return _out(_slp_identical(geom.v, geom.w, geom.gram))


def slp_identical_batch(v, w, gram):
    """
    slp_identical for a batch of triangles given by their Jacobian
    columns v, w and Gram determinants.

    :rtype: numpy.ndarray
    """
    v, w = _broadcast(v, w)
    return _slp_identical(v, w, np.asarray(gram, dtype=float))


class HArguments(object):
    """
    Arguments of H(a, b, c) = int_0^1 h(eta) d eta with

        h = (r.b + |r| b.c^) / (|r|^2 + |r| r.c^),   r = eta a + b.

    With b = p a + b_perp, q = |b_perp|/|a|.
    """

    def __init__(self, a, b, c):
        self.a, self.b, self.c = _broadcast(a, b, c)
        a2 = _dot(self.a, self.a)
        nc = _norm(self.c)
        if np.any(~(a2 > 0)) or np.any(~(nc > 0)):
            raise InvalidArgumentsError('H needs |a| > 0 and |c| > 0')

        self._norm_a = np.sqrt(a2)
        self._c_hat = self.c / nc[..., None]
        ratio2 = _dot(self.b, self.b) / a2
        self._ratio = np.sqrt(ratio2)
        self._p = _dot(self.a, self.b) / a2
        self._q = np.sqrt(np.maximum(ratio2 - self._p * self._p, 0.0))

    @property
    def norm_a(self):
        return self._norm_a

    @property
    def ratio(self):
        """
        |b|/|a|.

        :rtype: float | numpy.ndarray
        """
        return self._ratio

    @property
    def p(self):
        return self._p

    @property
    def q(self):
        return self._q

    @property
    def c_hat(self):
        return self._c_hat


def _h_values(args):
    """
    H(a, b, c) for a batch.

    :type args: HArguments
    :return: Values, a mask of entries the closed form cannot be trusted
    with, and a mask of degenerate entries of the q=0 branch.
    :rtype: tuple
    """
    na, p, q, ratio = args.norm_a, args.p, args.q, args.ratio
    on_line = q < Q_TOL * np.maximum(1.0, ratio)

    ac = _dot(args.a, args.c_hat)
    bc = _dot(args.b, args.c_hat)

    with np.errstate(all='ignore'):
        # q = 0: b = p a and h = p/(eta + p)
        b_zero = ratio < 1e-14
        line_value = np.where(b_zero, 0.0, p * np.log(np.abs(1.0 + 1.0 / p)))
        line_degenerate = on_line & ~b_zero & (
            ((p >= -1.0) & (p < 0.0)) |
            ((p > 0.0) & (na + ac <= 1e-14 * na)) |
            ((p < -1.0) & (na - ac <= 1e-14 * na)))

        qa = q * na
        bpc = bc - p * ac
        beta0 = bc + qa
        beta1 = 2.0 * p * na
        beta2 = bc - qa
        alpha0 = qa + bpc
        alpha1 = 2.0 * q * ac
        alpha2 = qa - bpc

        t0 = p / (q + np.sqrt(p * p + q * q))
        t1 = (p + 1.0) / (q + np.sqrt((p + 1.0) ** 2 + q * q))

        at_plus = alpha0 + alpha1 + alpha2
        at_minus = alpha0 - alpha1 + alpha2
        gamma1 = 0.5 * (beta0 + beta1 + beta2) / at_plus
        gamma2 = 0.5 * (beta0 - beta1 + beta2) / at_minus
        gamma3 = beta0 - (gamma1 + gamma2) * alpha0
        gamma4 = alpha2 * (gamma1 - gamma2)

        def log_part(t):
            return gamma2 * np.log1p(t) - gamma1 * np.log1p(-t)

        scale = alpha0 + np.abs(alpha1) + alpha2
        disc = 4.0 * alpha0 * alpha2 - alpha1 * alpha1
        disc_zero = disc < D_TOL * scale * scale
        sqrt_disc = np.sqrt(np.maximum(disc, 0.0))
        coef = (2.0 * gamma3 * alpha2 - gamma4 * alpha1) / alpha2
        t_star = -alpha1 / (2.0 * alpha2)

        def rational_positive(t):
            return (gamma4 / (2.0 * alpha2) * np.log(alpha0 + alpha1 * t + alpha2 * t * t) +
                    coef / sqrt_disc * np.arctan((alpha1 + 2.0 * alpha2 * t) / sqrt_disc))

        def rational_zero(t):
            return (gamma4 / alpha2 * np.log(np.abs(t - t_star)) -
                    coef / (2.0 * alpha2 * t + alpha1))

        rational = np.where(disc_zero, rational_zero(t1) - rational_zero(t0),
                            rational_positive(t1) - rational_positive(t0))
        value = 2.0 * q * (log_part(t1) - log_part(t0) + rational)

        tol = 1e-12 * scale
        pole_inside = (t_star > t0 - 1e-8) & (t_star < t1 + 1e-8)
        unstable = ((at_plus < tol) | (at_minus < tol) |
                    (disc_zero & ((alpha2 < tol) | pole_inside)) |
                    ~np.isfinite(value))

    values = np.where(on_line, line_value, value)
    return values, ~on_line & unstable, line_degenerate


def h_integral(args):
    """
    H(a, b, c) in closed form.

    :param args: The vectors a, b, c.
    :type args: HArguments
    :rtype: float | numpy.ndarray
    """
    values, unstable, degenerate = _h_values(args)
    if degenerate.any():
        raise DegenerateConfigurationError('collinear configuration with reversed direction',
                                           first_index(degenerate))
    if unstable.any():
        raise FallbackRequired(unstable)
    return _out(values)


def _log_ratio(r1, r2, c):
    """
    ln(N(r1)/N(r2)) with N(r) = |r||c| + r.c, for c x r1 = c x r2.

    :return: Values and a mask of vanishing arguments.
    :rtype: tuple
    """
    nc = _norm(c)
    d1 = _dot(r1, c)
    d2 = _dot(r2, c)
    n1 = _norm(r1) * nc
    n2 = _norm(r2) * nc
    with np.errstate(all='ignore'):
        # for r.c < 0, N(r) = |c x r|^2/(|r||c| - r.c)
        big1 = np.where(d1 >= 0, n1 + d1, _dot(np.cross(c, r1), np.cross(c, r1)) / (n1 - d1))
        big2 = np.where(d2 >= 0, n2 + d2, _dot(np.cross(c, r2), np.cross(c, r2)) / (n2 - d2))
        both_negative = (d1 < 0) & (d2 < 0)
        ratio = np.where(both_negative, (n2 - d2) / (n1 - d1), big1 / big2)
        vanishing = ~(ratio > LOG_FLOOR) | ~np.isfinite(ratio) | \
            (~both_negative & ~((big1 > LOG_FLOOR) & (big2 > LOG_FLOOR)))
        return np.log(ratio), vanishing


def _log_integral(a, b, c, shifted_a):
    """
    int_0^1 ln(N(eta a + b)/N(r2)) d eta by composite Gauss quadrature,
    with r2 = eta (a - c) + b if shifted_a else eta a + b - c.
    """
    rule = split_rule(FALLBACK_ORDER)
    eta = rule.nodes[:, None, None]
    r1 = eta * a[None] + b[None]
    if shifted_a:
        r2 = eta * (a - c)[None] + b[None]
    else:
        r2 = r1 - c[None]
    values, vanishing = _log_ratio(r1, r2, c[None])
    if vanishing.any():
        raise DegenerateConfigurationError('vanishing log argument in the fallback integrand',
                                           first_index(vanishing.any(axis=0)))
    return rule.weights @ values


def _h_difference(a, b, c, shifted_a):
    """
    H(a - c, b, c) - H(a, b, c) if shifted_a else H(a, b - c, c) - H(a, b, c).

    Entries the closed form cannot handle use the integration by parts
    identity: difference = ln(N(a + b)/N(a + b - c)) - int ln(N/N) d eta.
    """
    a, b, c = _broadcast(a, b, c)
    if shifted_a:
        high, unstable_high, degenerate_high = _h_values(HArguments(a - c, b, c))
    else:
        high, unstable_high, degenerate_high = _h_values(HArguments(a, b - c, c))
    low, unstable_low, degenerate_low = _h_values(HArguments(a, b, c))

    with np.errstate(invalid='ignore'):
        difference = high - low
    fallback = (unstable_high | unstable_low | degenerate_high | degenerate_low |
                ~np.isfinite(difference))

    if fallback.any():
        count = int(fallback.sum())
        log.debug('H fallback for %s of %s entries' % (count, fallback.size))
        TALLY.add(FALLBACK, count)
        af, bf, cf = a[fallback], b[fallback], c[fallback]
        end, vanishing = _log_ratio(af + bf, af + bf - cf, cf)
        if vanishing.any():
            raise DegenerateConfigurationError('vanishing log argument', first_index(fallback))
        difference = np.array(difference, copy=True)
        difference[fallback] = end - _log_integral(af, bf, cf, shifted_a)

    return difference


def _edge_term(a, b, c, variant):
    a, b, c = _broadcast(a, b, c)
    end, vanishing = _log_ratio(a + b, a + b - c, c)
    if vanishing.any():
        raise DegenerateConfigurationError('vanishing log argument', first_index(vanishing))
    TALLY.add(ANTIDERIVATIVE, end.size)
    return (end - _h_difference(a, b, c, variant == EDGEJ)) / _norm(c)


def slp_edge_term(a, b, c, variant=EDGE1):
    """
    int_0^1 int_0^1 1/|eta3 c + eta4 a + b - c| d eta3 d eta4 (variant edge1),
    or the second-kind reduction with H(a - c, b, c) (variant edgej).

    :param a: 3D vector(s).
    :param b: 3D vector(s).
    :param c: 3D vector(s), nonzero.
    :param variant: EDGE1 or EDGEJ.
    :type variant: str
    :rtype: float | numpy.ndarray
    """
    if variant not in (EDGE1, EDGEJ):
        raise InvalidArgumentsError('unknown edge term variant `%s`' % variant)
    return _out(_edge_term(a, b, c, variant))


def slp_edge(u, v, w, gram_sigma, gram_tau):
    """
    SLP integral of two triangles sharing the edge v.

    tau is p + y1 v + y2 u and sigma is p + x1 v + x2 w.

    :rtype: float | numpy.ndarray
    """
    u, v, w = _broadcast(u, v, w)
    total = _edge_term(w, v, u + v, EDGE1)
    a = np.stack([v, v, u + v + w, u + v + w])
    b = np.stack([w, u, -w, -w])
    c = np.stack([u + v, w + v, u, v + w])
    total = total + _edge_term(a, b, c, EDGEJ).sum(axis=0)
    return _out(np.asarray(gram_sigma) * gram_tau / (24.0 * np.pi) * total)


def _vertex_half(u1, u2, v1, v2, rule):
    first = _edge_term(-v2, u1 + u2 - v1, u2, EDGE1)
    eta = rule.nodes[:, None]
    a = (u1 + u2)[..., None, :]
    c = u2[..., None, :]
    b = -v1[..., None, :] - eta * v2[..., None, :]
    difference = _h_difference(a, b, c, True)
    return first - (difference @ rule.weights) / _norm(u2)


def slp_vertex(u1, u2, v1, v2, gram_sigma, gram_tau, order):
    """
    SLP integral of two triangles sharing the vertex p.

    tau is p + y1 u1 + y2 u2 and sigma is p + x1 v1 + x2 v2; the outer
    integral runs over `order` Gauss-Legendre nodes.

    :rtype: float | numpy.ndarray
    """
    rule = gauss_legendre(order)
    u1, u2, v1, v2 = _broadcast(u1, u2, v1, v2)
    total = _vertex_half(u1, u2, v1, v2, rule) + _vertex_half(v1, v2, u1, u2, rule)
    return _out(np.asarray(gram_sigma) * gram_tau / (12.0 * np.pi) * total)


def slp_farfield(p, u1, u2, v1, v2, gram_sigma, gram_tau, order):
    """
    SLP integral of two disjoint triangles.

    tau is p1 + y1 u1 + y2 u2, sigma is p2 + x1 v1 + x2 v2 and p = p1 - p2.
    The inner integrals over (x2, y2) are closed form edge terms, the
    outer ones an order x order Gauss-Legendre rule.

    :rtype: float | numpy.ndarray
    """
    rule = gauss_legendre(order)
    p, u1, u2, v1, v2 = _broadcast(p, u1, u2, v1, v2)

    def node_axes(z):
        return z[..., None, None, :]

    eta_sigma = rule.nodes[:, None, None]
    eta_tau = rule.nodes[None, :, None]
    a = -eta_sigma * node_axes(v2)
    b = node_axes(p) - eta_sigma * node_axes(v1) + eta_tau * node_axes(u1 + u2)
    c = eta_tau * node_axes(u2)

    terms = _edge_term(a, b, c, EDGE1)
    weights = np.outer(rule.weights * rule.nodes, rule.weights * rule.nodes)
    total = np.einsum('...kl,kl->...', terms, weights)
    return _out(np.asarray(gram_sigma) * gram_tau / (4.0 * np.pi) * total)
