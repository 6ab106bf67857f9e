# -*- coding: utf-8 -*-

from datetime import datetime

from colorama import init, Style, Fore

init(autoreset=True)


class Color(object):
    """
    Console colors per kind of message.
    """
    CLOCK = Fore.WHITE
    PROGRESS = Fore.CYAN
    RESULT = Style.BRIGHT + Fore.GREEN
    ERROR = Style.BRIGHT + Fore.RED
    RESET = Style.RESET_ALL


class Console(object):
    """
    Progress, results and errors of a command.

    In quiet mode only errors are written.
    """

    TIME_FORMATS = {True: '%H:%M:%S.%f', False: '%I:%M:%S %p'}

    def __init__(self, use_colors=False, use24hour=True, quiet=False):
        self._use_colors = use_colors
        self._use24hour = use24hour
        self.quiet = quiet

    def _stamp(self):
        stamp = datetime.now().strftime(self.TIME_FORMATS[self._use24hour])
        # milliseconds, not microseconds
        return stamp[:-3] if self._use24hour else stamp

    def write(self, text, color='', ts=True, force=False):
        """
        Write a line to stdout.

        :param text: The text to write.
        :type text: str
        :param color: A Color value, ignored without colors.
        :type color: str
        :param ts: Prefix a time stamp.
        :type ts: bool
        :param force: Write even in quiet mode.
        :type force: bool
        """
        if self.quiet and not force:
            return

        stamp = '[%s] ' % self._stamp() if ts else ''
        if self._use_colors:
            print('%s%s%s%s%s' % (Color.CLOCK, stamp, Color.RESET, color, text))
        else:
            print(stamp + text)

    def error(self, text):
        self.write(text, color=Color.ERROR, force=True)

    def result(self, text):
        self.write(text, color=Color.RESULT)

    def progress(self, text):
        self.write(text, color=Color.PROGRESS)
