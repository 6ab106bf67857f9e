# -*- coding: utf-8 -*-

"""
bemquad command line entry point.

    python bemquad.py assemble --mesh ico2.off --operator V --out V.bemm
"""

import sys
import logging

import config
from handlers import run
from util import Console


log = logging.getLogger(__name__)


def logger_setup():
    if config.DEBUG_TO_FILE:

        fmt = '%(asctime)s : %(levelname)s : %(filename)s : ' \
              '%(lineno)d : %(funcName)s() : %(name)s : %(message)s'

        logging.basicConfig(filename=config.DEBUG_FILE_NAME,
                            level=config.DEBUG_LEVEL, format=fmt)
    else:
        logging.getLogger().addHandler(logging.NullHandler())


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]

    console = Console(use_colors=config.CONSOLE_COLORS, use24hour=config.USE_24HOUR)
    return run(argv, config, console)


if __name__ == '__main__':

    logger_setup()

    log.info('starting bemquad v%s' % config.VERSION)

    sys.exit(main())
