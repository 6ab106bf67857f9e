# -*- coding: utf-8 -*-

import codecs
import csv
import os
import struct
import logging

import numpy as np

log = logging.getLogger(__name__)

BEMM_MAGIC = b'BEMM'
BEMM_HEADER = struct.Struct('<4sII')


class FileHandlerError(Exception):
    """ Base file handler exception. """
    pass


class BemmFormatError(FileHandlerError):
    """ Raised when a BEMM file has a wrong magic or a truncated payload. """
    pass


def _ensure_dir(file_path):
    directory = os.path.dirname(file_path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)


def reader(file_path, strict=False):
    """
    Reads the lines of a UTF-8 text file.

    :param file_path: The path to the file.
    :type file_path: str
    :param strict: Raise FileHandlerError instead of logging and
    returning an empty list when the file can not be read or decoded.
    :type strict: bool
    :return: A list of lines or empty list on error.
    :rtype: list
    """
    file_content = []
    if os.path.isfile(file_path):
        try:
            with codecs.open(file_path, encoding='utf-8') as f:
                for line in f:
                    file_content.append(line.rstrip('\r\n'))
        except (IOError, UnicodeDecodeError) as e:
            if strict:
                raise FileHandlerError('cannot read `%s`: %s' % (file_path, e))
            log.error('failed to read file: %s %r' % (file_path, e))
            return []
    elif strict:
        raise FileHandlerError('no such file `%s`' % file_path)
    else:
        log.warning('no such file: %s' % file_path)
    return file_content


def writer(file_path, write_this):
    """
    Append a line to a file.

    :param file_path: The path to the file.
    :type file_path: str
    :param write_this: The content to write to file.
    :type write_this: str
    """
    _ensure_dir(file_path)
    with codecs.open(file_path, mode='a', encoding='utf-8') as f:
        f.write(write_this + '\n')


def write_lines(file_path, lines):
    """
    Write lines to a file, replacing its content.

    :param file_path: The path to the file.
    :type file_path: str
    :param lines: The lines to write.
    :type lines: list
    """
    _ensure_dir(file_path)
    with codecs.open(file_path, mode='w', encoding='utf-8') as f:
        for line in lines:
            f.write(line + '\n')


def write_csv(file_path, header, rows):
    """
    Write a CSV file with a header row.

    Floats are written with repr precision and '.' as decimal separator.

    :param file_path: The path to the file.
    :type file_path: str
    :param header: Column names.
    :type header: list
    :param rows: Iterable of row sequences.
    """
    _ensure_dir(file_path)
    with open(file_path, mode='w', newline='') as f:
        csv_writer = csv.writer(f)
        csv_writer.writerow(header)
        for row in rows:
            csv_writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x
                                 for x in row])


def read_csv(file_path):
    """
    Read a CSV file written by write_csv.

    :param file_path: The path to the file.
    :type file_path: str
    :return: The header and the rows as lists of strings.
    :rtype: tuple
    """
    with open(file_path, newline='') as f:
        rows = list(csv.reader(f))
    if len(rows) == 0:
        return [], []
    return rows[0], rows[1:]


def write_bemm(file_path, entries):
    """
    Write a dense matrix in the BEMM binary layout.

    :param file_path: The path to the file.
    :type file_path: str
    :param entries: 2D array of entries.
    :type entries: numpy.ndarray
    """
    entries = np.asarray(entries, dtype='<f8')
    rows, cols = entries.shape
    _ensure_dir(file_path)
    with open(file_path, mode='wb') as f:
        f.write(BEMM_HEADER.pack(BEMM_MAGIC, rows, cols))
        f.write(np.ascontiguousarray(entries).tobytes())
    log.debug('wrote %sx%s matrix to %s' % (rows, cols, file_path))


def read_bemm(file_path):
    """
    Read a dense matrix from the BEMM binary layout.

    :param file_path: The path to the file.
    :type file_path: str
    :return: 2D array of entries.
    :rtype: numpy.ndarray
    """
    with open(file_path, mode='rb') as f:
        data = f.read()

    if len(data) < BEMM_HEADER.size:
        raise BemmFormatError('%s: truncated header' % file_path)

    magic, rows, cols = BEMM_HEADER.unpack_from(data)
    if magic != BEMM_MAGIC:
        raise BemmFormatError('%s: bad magic %r' % (file_path, magic))

    payload = data[BEMM_HEADER.size:]
    if len(payload) != rows * cols * 8:
        raise BemmFormatError('%s: expected %s bytes of entries, found %s' %
                              (file_path, rows * cols * 8, len(payload)))

    return np.frombuffer(payload, dtype='<f8').reshape(rows, cols).astype(np.float64)


def write_off(file_path, vertices, triangles):
    """
    Write a triangle mesh in OFF format (0-based indices).

    :param file_path: The path to the file.
    :type file_path: str
    :param vertices: (M, 3) vertex coordinates.
    :param triangles: (N, 3) vertex indices.
    """
    lines = ['OFF', '%d %d 0' % (len(vertices), len(triangles))]
    for x, y, z in vertices:
        lines.append('%r %r %r' % (float(x), float(y), float(z)))
    for i, j, k in triangles:
        lines.append('3 %d %d %d' % (i, j, k))
    write_lines(file_path, lines)


def write_obj(file_path, vertices, triangles):
    """
    Write a triangle mesh in the OBJ subset (v/f lines, 1-based indices).

    :param file_path: The path to the file.
    :type file_path: str
    :param vertices: (M, 3) vertex coordinates.
    :param triangles: (N, 3) vertex indices.
    """
    lines = []
    for x, y, z in vertices:
        lines.append('v %r %r %r' % (float(x), float(y), float(z)))
    for i, j, k in triangles:
        lines.append('f %d %d %d' % (i + 1, j + 1, k + 1))
    write_lines(file_path, lines)
