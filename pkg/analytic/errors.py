# -*- coding: utf-8 -*-

import numpy as np


class AnalyticBaseError(Exception):
    """ Base exception of the closed form integrators. """
    pass


class InvalidArgumentsError(AnalyticBaseError):
    """ Raised for arguments outside the domain of a closed form. """
    pass


class DegenerateConfigurationError(AnalyticBaseError):
    """
    Raised when a closed form has no finite value for a configuration,
    e.g. a vanishing log argument.
    """
    def __init__(self, message, index=None):
        if index is not None:
            message = '%s (entry %s)' % (message, index)
        super(DegenerateConfigurationError, self).__init__(message)
        self.index = index


class FallbackRequired(AnalyticBaseError):
    """
    Signals entries whose closed form is numerically delicate and must
    be integrated numerically instead.
    """
    def __init__(self, mask):
        mask = np.asarray(mask, dtype=bool)
        super(FallbackRequired, self).__init__('%s entries need the fallback integrator' %
                                               int(mask.sum()))
        self.mask = mask


def first_index(mask):
    """
    Multi-index of the first True entry of a mask, for error reports.

    :rtype: tuple | None
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return None
    flat = int(np.argmax(mask.ravel()))
    if mask.ndim == 0:
        return ()
    return tuple(int(k) for k in np.unravel_index(flat, mask.shape))
