from analytic.errors import (AnalyticBaseError, InvalidArgumentsError,
                             DegenerateConfigurationError, FallbackRequired)
from analytic.tally import EvaluationTally, TALLY, ANTIDERIVATIVE, FALLBACK
from analytic.slp import (QuadraticRadical, HArguments, antiderivative_F, slp_identical,
                          slp_identical_batch,
                          h_integral, slp_edge_term, slp_edge, slp_vertex, slp_farfield)
from analytic.dlp import (EdgeKernelParams, DlpCoefficients, g_branch, dlp_h_integral,
                          dlp_h_numeric, dlp_edge, dlp_vertex, dlp_farfield,
                          dlp_farfield_inner, dlp_farfield_combine)

from analytic import slp as _slp, dlp as _dlp


def set_fallback_order(order):
    """
    Set the Gauss-Legendre order of the numerical fallback integrators.

    :param order: Points per half interval, 1..64.
    :type order: int
    """
    if not 1 <= order <= 64:
        raise InvalidArgumentsError('fallback order must be in 1..64, got %r' % order)
    _slp.FALLBACK_ORDER = order
    _dlp.FALLBACK_ORDER = order
