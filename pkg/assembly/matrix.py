# -*- coding: utf-8 -*-

import logging

import numpy as np

from assembly.errors import AssemblyBaseError, DimensionMismatchError
from util import file_handler

log = logging.getLogger(__name__)

CSV_HEADER = ['row', 'col', 'value']


class DenseMatrix(object):
    """
    A dense real matrix with finite entries.
    """

    def __init__(self, entries):
        """
        Initialize the matrix.

        :param entries: 2D array of entries, copied.
        :type entries: array_like
        """
        entries = np.array(entries, dtype=np.float64)
        if entries.ndim != 2 or 0 in entries.shape:
            raise DimensionMismatchError('expected a non-empty 2D array, got shape %s' %
                                         (entries.shape,))
        if not np.all(np.isfinite(entries)):
            bad = np.argwhere(~np.isfinite(entries))[0]
            raise AssemblyBaseError('non-finite matrix entry at (%s, %s)' % (bad[0], bad[1]))
        entries.setflags(write=False)
        self._entries = entries

    @property
    def rows(self):
        return self._entries.shape[0]

    @property
    def cols(self):
        return self._entries.shape[1]

    @property
    def shape(self):
        return self._entries.shape

    @property
    def entries(self):
        """
        Read-only row-major entries.

        :rtype: numpy.ndarray
        """
        return self._entries

    def frobenius_norm(self):
        return float(np.linalg.norm(self._entries))

    def to_bemm(self, file_path):
        file_handler.write_bemm(file_path, self._entries)

    @classmethod
    def from_bemm(cls, file_path):
        return cls(file_handler.read_bemm(file_path))

    def to_csv(self, file_path):
        """
        Write the entries as (row, col, value) lines with a header row.

        :param file_path: The path to the file.
        :type file_path: str
        """
        rows, cols = np.indices(self.shape)
        file_handler.write_csv(file_path, CSV_HEADER,
                               zip(rows.ravel().tolist(), cols.ravel().tolist(),
                                   self._entries.ravel()))

    def __repr__(self):
        return 'DenseMatrix(%sx%s)' % self.shape


def frobenius_rel_error(approximation, reference):
    """
    Relative error |A - B|_F / |B|_F.

    :param approximation: A.
    :type approximation: DenseMatrix
    :param reference: B, nonzero.
    :type reference: DenseMatrix
    :rtype: float
    """
    if approximation.shape != reference.shape:
        raise DimensionMismatchError('cannot compare %sx%s with %sx%s' %
                                     (approximation.shape + reference.shape))
    norm = reference.frobenius_norm()
    if norm == 0:
        raise AssemblyBaseError('reference matrix has zero Frobenius norm')
    return float(np.linalg.norm(approximation.entries - reference.entries)) / norm
