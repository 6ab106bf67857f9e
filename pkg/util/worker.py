# -*- coding: utf-8 -*-

# Slightly modified from:
# https://stackoverflow.com/questions/3033952/threading-pool-similar-to-the-multiprocessing-pool
# and/or http://code.activestate.com/recipes/577187-python-thread-pool/

import os
import queue
import threading

import logging


log = logging.getLogger(__name__)


class WorkerTaskError(Exception):
    """ Raised by ThreadPool.map when at least one task failed. """
    def __init__(self, index, error):
        super(WorkerTaskError, self).__init__('task %s failed: %r' % (index, error))
        self.index = index
        self.error = error


class Worker(threading.Thread):
    """
    Daemon thread running tasks from the pool queue until exit.
    """

    def __init__(self, tasks):
        threading.Thread.__init__(self)
        self.tasks = tasks
        self.daemon = True
        self.start()

    def run(self):
        """ Run queued tasks, logging failures. """
        while True:
            func, args, kwargs = self.tasks.get()
            try:
                func(*args, **kwargs)
            except Exception as e:
                log.error('worker task %s raised: %r' % (func, e))
            finally:
                self.tasks.task_done()


class _Countdown(object):
    """
    Unfinished tasks of one map call.
    """

    def __init__(self, count):
        self._count = count
        self._done = threading.Condition()

    def task_done(self):
        with self._done:
            self._count -= 1
            if self._count == 0:
                self._done.notify_all()

    def wait(self):
        with self._done:
            self._done.wait_for(lambda: self._count == 0)


class ThreadPool:
    """
    Fixed size pool of daemon threads.

    Tasks are pulled from a shared queue by a fixed number of daemon
    workers. `map` keeps one result slot per argument so the order of the
    results never depends on which worker finished first, and it waits
    for its own tasks only, so several threads can share a pool.
    """

    def __init__(self, num_threads):
        """
        :param num_threads: Number of workers, also the queue bound.
        :type num_threads: int
        """
        log.info('initiating thread pool (%s)' % num_threads)
        self.num_threads = num_threads
        self.tasks = queue.Queue(num_threads)

        for _ in range(num_threads):
            Worker(self.tasks)

    def add_task(self, func, *args, **kwargs):
        """
        Queue func(*args, **kwargs), blocking while the queue is full.
        """
        log.debug('adding task, func=%s' % func)
        self.tasks.put((func, args, kwargs))

    def map(self, func, args_list):
        """
        Call func once per item of args_list and wait for all of them.

        :param func: The function to call, with one positional argument.
        :param args_list: The arguments, one task each.
        :type args_list: list
        :return: The results in the order of args_list.
        :rtype: list
        """
        results = [None] * len(args_list)
        errors = {}
        countdown = _Countdown(len(args_list))

        def _run(index, args):
            try:
                results[index] = func(args)
            except Exception as e:
                errors[index] = e
                raise
            finally:
                countdown.task_done()

        for index, args in enumerate(args_list):
            self.add_task(_run, index, args)
        countdown.wait()

        if len(errors) > 0:
            first = min(errors)
            log.error('%s of %s tasks failed, first failure at task %s' %
                      (len(errors), len(args_list), first))
            raise WorkerTaskError(first, errors[first])

        return results


def thread_count(requested):
    """
    Resolve a requested thread count.

    :param requested: The requested count, 0 or less means all cores.
    :type requested: int
    :return: A positive thread count.
    :rtype: int
    """
    if requested is None or requested <= 0:
        return os.cpu_count() or 1
    return requested
