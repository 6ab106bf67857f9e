# -*- coding: utf-8 -*-

"""
Settings from config.ini, read once at import.

Only the command layer imports this module. Library code gets its
values passed in.
"""

import os
import sys

from configparser import ConfigParser

__version__ = '0.3.0'

# required typed sections
CONFIG_SECTIONS = ['strings', 'booleans', 'integers', 'floats']

# exit code for config errors, same as usage errors
EXIT_CONFIG = 2


class ConfigBaseError(Exception):
    """ Problems with config.ini. """


class MissingConfigFileError(ConfigBaseError):
    """ config.ini could not be read. """


class MissingSectionError(ConfigBaseError):
    """ One or more of the typed sections is missing. """


class UnsupportedReturnTypeError(ConfigBaseError):
    """ get() was asked for a type other than str, int, float or bool. """


class Config(object):
    """
    Typed access to the sections of config.ini.

    Option names keep their case; values are never interpolated.
    """

    RTYPES = ('str', 'int', 'float', 'bool')

    def __init__(self, file_path='', file_name='config.ini'):
        """
        :param file_path: Directory holding the file.
        :type file_path: str
        :param file_name: File name inside file_path.
        :type file_name: str
        """
        self._file_path = file_path
        self._file_name = file_name
        self._parser = None
        self._required = CONFIG_SECTIONS

    @property
    def location(self):
        return os.path.join(self._file_path, self._file_name)

    def load_file(self):
        """ Parse the file, raising MissingConfigFileError if it can not be read. """
        parser = ConfigParser(allow_no_value=True, interpolation=None)
        parser.optionxform = str
        if not parser.read(self.location):
            raise MissingConfigFileError('cannot read config file `%s`' % self.location)
        self._parser = parser

    def has_sections(self):
        """ Raise MissingSectionError naming every missing typed section. """
        missing = [name for name in self._required if not self._parser.has_section(name)]
        if missing:
            raise MissingSectionError('%s is missing the section(s) %s' %
                                      (self._file_name, ', '.join(missing)))

    def get(self, section, option, default=None, rtype='str'):
        """
        A typed option value.

        Missing or empty options, and values that do not convert to
        rtype, give the default.

        :param rtype: One of str, int, float, bool.
        :type rtype: str
        :rtype: str | int | float | bool | None
        """
        if rtype not in self.RTYPES:
            raise UnsupportedReturnTypeError('unsupported return type `%s`' % rtype)

        if self._parser is None or not self._parser.has_option(section, option):
            return default

        raw = self._parser.get(section, option)
        if raw is None or not raw.strip():
            return default
        if rtype == 'str':
            return raw

        convert = {'int': self._parser.getint,
                   'float': self._parser.getfloat,
                   'bool': self._parser.getboolean}[rtype]
        try:
            return convert(section, option)
        except ValueError:
            return default


def _load():
    """
    Load config.ini next to this file, or exit with EXIT_CONFIG.

    :rtype: Config
    """
    conf = Config(file_path=os.path.dirname(os.path.abspath(__file__)))
    try:
        conf.load_file()
        conf.has_sections()
    except ConfigBaseError as e:
        print(e)
        print('\nfix config.ini and run the command again.')
        sys.exit(EXIT_CONFIG)
    return conf


config = _load()

# Config
VERSION = __version__
DEBUG_TO_FILE = config.get('booleans', 'DebugToFile', default=False, rtype='bool')
DEBUG_LEVEL = config.get('integers', 'DebugLevel', default=30, rtype='int')
DEBUG_FILE_NAME = config.get('strings', 'DebugFileName', default='debug.log')
CONSOLE_COLORS = config.get('booleans', 'ConsoleColors', default=True, rtype='bool')
USE_24HOUR = config.get('booleans', 'Use24Hour', default=True, rtype='bool')
OUTPUT_PATH = config.get('strings', 'OutputPath', default='results/')
MANIFEST_FILE_NAME = config.get('strings', 'ManifestFileName', default='manifest.jsonl')
THREADS = config.get('integers', 'Threads', default=0, rtype='int')
DEFAULT_R = config.get('integers', 'DefaultR', default=8, rtype='int')
DEFAULT_S_OFFSET = config.get('integers', 'DefaultSOffset', default=2, rtype='int')
REFERENCE_R = config.get('integers', 'ReferenceR', default=20, rtype='int')
REFERENCE_S = config.get('integers', 'ReferenceS', default=20, rtype='int')
MAX_LEVEL = config.get('integers', 'MaxLevel', default=7, rtype='int')
MAX_TRIANGLES = config.get('integers', 'MaxTriangles', default=6000, rtype='int')
FALLBACK_ORDER = config.get('integers', 'FallbackOrder', default=32, rtype='int')
BUMP_AMPLITUDE = config.get('floats', 'BumpAmplitude', default=0.2, rtype='float')
SPHERE_RADIUS = config.get('floats', 'SphereRadius', default=1.0, rtype='float')
