# -*- coding: utf-8 -*-

import json
import time
import logging
import contextlib
from datetime import datetime

from analytic import FALLBACK
from util import file_handler

log = logging.getLogger(__name__)


class RunManifest(object):
    """
    Parameters, timings and counters of one command run, stored as one
    JSON line next to the command's output.
    """

    def __init__(self, command, params):
        """
        Initialize the manifest.

        :param command: The command name.
        :type command: str
        :param params: All resolved parameters.
        :type params: dict
        """
        self.command = command
        self.params = dict(params)
        self.created = datetime.now().isoformat(timespec='seconds')
        self.timings = {}
        self.pair_counts = {}
        self.evaluated_pairs = {}
        self.evaluations = {}
        self.results = {}

    @contextlib.contextmanager
    def phase(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start

    def add_report(self, label, report):
        """
        Merge an assembly report under a label.

        :param label: Prefix of the merged entries, e.g. `V`.
        :type label: str
        :param report: The report.
        :type report: AssemblyReport
        """
        for name, seconds in report.timings.items():
            self.timings['%s.%s' % (label, name)] = seconds
        if report.pair_counts:
            self.pair_counts[label] = dict(report.pair_counts)
        if report.evaluated_pairs:
            self.evaluated_pairs[label] = dict(report.evaluated_pairs)
        for name, count in report.evaluations.items():
            self.evaluations['%s.%s' % (label, name)] = count

    @property
    def fallback_integrations(self):
        return sum(count for name, count in self.evaluations.items() if name.endswith(FALLBACK))

    def as_dict(self):
        return dict(command=self.command, created=self.created, params=self.params,
                    timings=self.timings, pair_counts=self.pair_counts,
                    evaluated_pairs=self.evaluated_pairs, evaluations=self.evaluations,
                    fallback_integrations=self.fallback_integrations, results=self.results)

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True)

    def write(self, file_path):
        """
        Append the manifest as one JSON line.

        :param file_path: The manifest file.
        :type file_path: str
        """
        file_handler.writer(file_path, self.to_json())
        log.info('manifest written to %s' % file_path)


def read_manifests(file_path):
    """
    Read all manifests of a JSON lines file.

    :param file_path: The manifest file.
    :type file_path: str
    :rtype: list
    """
    return [json.loads(line) for line in file_handler.reader(file_path) if line.strip()]
