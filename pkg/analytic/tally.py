# -*- coding: utf-8 -*-

import threading


ANTIDERIVATIVE = 'antiderivative_bundles'
FALLBACK = 'fallback_integrations'


class EvaluationTally(object):
    """
    Thread safe counters of closed form evaluations.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._counts = {}

    def add(self, name, count=1):
        """
        Increase a counter.

        :param name: Counter name.
        :type name: str
        :param count: Increment.
        :type count: int
        """
        if count:
            with self._lock:
                self._counts[name] = self._counts.get(name, 0) + int(count)

    def snapshot(self):
        """
        :return: A copy of all counters.
        :rtype: dict
        """
        with self._lock:
            return dict(self._counts)

    def reset(self):
        with self._lock:
            self._counts.clear()


# shared by the analytic integrators
TALLY = EvaluationTally()
