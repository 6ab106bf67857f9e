# -*- coding: utf-8 -*-


class AssemblyBaseError(Exception):
    """ Base assembly exception. """
    pass


class DimensionMismatchError(AssemblyBaseError):
    """ Raised when matrix or vector dimensions do not fit. """
    pass


class MeshTooLargeError(AssemblyBaseError):
    """ Raised when a mesh exceeds the dense assembly limit. """
    pass


class PairEvaluationError(AssemblyBaseError):
    """
    Raised when pair integrals failed. Carries the failing
    (sigma, tau, case) triples.
    """
    def __init__(self, failures):
        self.failures = list(failures)
        shown = ', '.join('(%s, %s, %s)' % failure for failure in self.failures[:5])
        more = '' if len(self.failures) <= 5 else ' and %s more' % (len(self.failures) - 5)
        super(PairEvaluationError, self).__init__('pair evaluation failed for %s%s' % (shown, more))


class SolverError(AssemblyBaseError):
    """ Raised when the linear system cannot be solved to tolerance. """
    pass
