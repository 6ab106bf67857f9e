# -*- coding: utf-8 -*-

"""
Row data of the double layer inner integrals.

The rows live in dlp_rows.txt. Each one is turned into the coefficients
of the smooth function h(x) for the inner endpoints y = 0 and y = 1.
"""

import os
import re
import logging
import functools

import numpy as np

from analytic.errors import InvalidArgumentsError
from util import file_handler

log = logging.getLogger(__name__)

ROWS_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'dlp_rows.txt')

_TERM = re.compile(r'([+-]?)([A-Za-z][A-Za-z0-9]*|0)')


class RowFormatError(InvalidArgumentsError):
    """ Raised for malformed lines in the row file. """
    pass


def _parse_combination(text):
    """
    Parse a signed sum of symbols such as `-c0+c2`.

    :return: List of (sign, symbol), empty for `0`.
    :rtype: list
    """
    terms = _TERM.findall(text)
    if ''.join(sign + name for sign, name in terms) != text:
        raise RowFormatError('cannot parse `%s`' % text)
    return [(-1.0 if sign == '-' else 1.0, name) for sign, name in terms if name != '0']


def _parse_polynomial(text):
    return [_parse_combination(coeff) for coeff in text.split(',')]


class DlpRow(object):
    """ One inner integral, see dlp_rows.txt. """

    __slots__ = ('case', 'term', 'm', 'a0', 'a1', 'b', 'e0', 'e1')

    def __init__(self, case, term, m, a0, a1, b, e0, e1):
        self.case = case
        self.term = term
        self.m = m
        self.a0 = a0
        self.a1 = a1
        self.b = b
        self.e0 = e0
        self.e1 = e1

    def __repr__(self):
        return '<DlpRow %s %s>' % (self.case, self.term)


@functools.lru_cache(maxsize=None)
def load_rows(file_path=ROWS_FILE):
    """
    Load the row file.

    :param file_path: Path of the row file.
    :type file_path: str
    :return: Rows keyed by (case, term).
    :rtype: dict
    """
    rows = {}
    for number, line in enumerate(file_handler.reader(file_path), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue

        parts = line.split()
        if len(parts) != 8:
            raise RowFormatError('%s:%s: expected 8 columns, found %s' % (file_path, number, len(parts)))

        case, term, m = parts[0], int(parts[1]), int(parts[2])
        if m not in (0, 1):
            raise RowFormatError('%s:%s: m must be 0 or 1' % (file_path, number))

        vectors = [_parse_combination(text) for text in parts[3:6]]
        if not all(vectors):
            raise RowFormatError('%s:%s: vector columns cannot be zero' % (file_path, number))

        rows[(case, term)] = DlpRow(case, term, m, vectors[0], vectors[1], vectors[2],
                                    _parse_polynomial(parts[6]), _parse_polynomial(parts[7]))

    if not rows:
        raise RowFormatError('no rows in %s' % file_path)
    log.debug('loaded %s double layer rows' % len(rows))
    return rows


def _evaluate(combination, env):
    total = 0.0
    for sign, name in combination:
        try:
            total = total + sign * env[name]
        except KeyError:
            raise InvalidArgumentsError('missing value for `%s`' % name)
    return total


def _polymul(a, b):
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out


def _polyadd(a, b, sign=1.0):
    size = max(len(a), len(b))
    a = list(a) + [0.0] * (size - len(a))
    b = list(b) + [0.0] * (size - len(b))
    return [x + sign * y for x, y in zip(a, b)]


def _dot(a, b):
    return np.einsum('...i,...i->...', a, b)


def row_coefficients(row, endpoint, env):
    """
    Coefficients of h(x) = P(x)/(d (d0 + d1 x + x^2) sqrt(q) sqrt(q0 + q1 x + x^2))
    at one inner endpoint.

    :param row: The inner integral.
    :type row: DlpRow
    :param endpoint: 0 or 1.
    :type endpoint: int
    :param env: Arrays for the symbols of the row, broadcastable.
    :type env: dict
    :return: q, q0, q1, d, d0, d1 and the cubic coefficients p0..p3.
    :rtype: dict
    """
    a0 = _evaluate(row.a0, env)
    a1 = _evaluate(row.a1, env)
    b = _evaluate(row.b, env)
    a0, a1, b = np.broadcast_arrays(a0, a1, b)

    c0 = np.cross(a0, b)
    c1 = np.cross(a1, b)
    d = _dot(c1, c1)
    with np.errstate(divide='ignore', invalid='ignore'):
        d0 = _dot(c0, c0) / d
        d1 = 2.0 * _dot(c0, c1) / d

    if endpoint == 1:
        r0 = a0 + b if row.m == 0 else a0
        r1 = a1 + b if row.m == 1 else a1
    else:
        r0, r1 = a0, a1
    q = _dot(r1, r1)
    q0 = _dot(r0, r0) / q
    q1 = 2.0 * _dot(r0, r1) / q

    e0 = [_evaluate(coeff, env) for coeff in row.e0]
    e1 = [_evaluate(coeff, env) for coeff in row.e1]

    r_dot_b = [_dot(a0, b), _dot(a1, b)]
    r_squared = [_dot(a0, a0), 2.0 * _dot(a0, a1), _dot(a1, a1)]
    shifted_r_dot_b = r_dot_b if row.m == 0 else [0.0] + r_dot_b

    if endpoint == 1:
        b_squared = [_dot(b, b)] if row.m == 0 else [0.0, _dot(b, b)]
        poly = _polyadd(_polymul(e0, _polyadd(b_squared, r_dot_b)),
                        _polymul(e1, _polyadd(r_squared, shifted_r_dot_b)), sign=-1.0)
    else:
        poly = _polyadd(_polymul(e0, r_dot_b), _polymul(e1, r_squared), sign=-1.0)

    if len(poly) > 4:
        if any(np.any(coeff != 0) for coeff in poly[4:]):
            raise InvalidArgumentsError('row %r gives a numerator of degree > 3' % row)
        poly = poly[:4]
    poly = poly + [0.0] * (4 - len(poly))

    return dict(q=q, q0=q0, q1=q1, d=d, d0=d0, d1=d1,
                p0=poly[0], p1=poly[1], p2=poly[2], p3=poly[3])
