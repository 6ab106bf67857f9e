# -*- coding: utf-8 -*-

import os
import logging

from mesh.surface import SurfaceMesh, MeshParseError
from util import file_handler

log = logging.getLogger(__name__)

FORMATS = ('off', 'obj')


def _format_from_path(path, fmt):
    if fmt is None:
        fmt = os.path.splitext(path)[1].lstrip('.')
    fmt = fmt.lower()
    if fmt not in FORMATS:
        raise MeshParseError('unsupported mesh format `%s`' % fmt)
    return fmt


def _content_lines(lines):
    """ Yield (line number, tokens) skipping blanks and comments. """
    for number, line in enumerate(lines, start=1):
        line = line.split('#', 1)[0].strip()
        if line:
            yield number, line.split()


def _floats(tokens, number):
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise MeshParseError('line %s: expected numbers, got %s' % (number, ' '.join(tokens)))


def _ints(tokens, number):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise MeshParseError('line %s: expected integers, got %s' % (number, ' '.join(tokens)))


def parse_off(lines):
    """
    Parse OFF text.

    :param lines: The file lines.
    :type lines: list
    :return: Vertices and 0-based triangles.
    :rtype: tuple
    """
    content = list(_content_lines(lines))
    if not content or content[0][1][0] != 'OFF':
        raise MeshParseError('missing OFF header')

    header = content[0][1][1:]
    body = content[1:]
    if not header:
        if not body:
            raise MeshParseError('missing counts line')
        number, header = body[0]
        body = body[1:]
    else:
        number = content[0][0]

    counts = _ints(header, number)
    if len(counts) < 2:
        raise MeshParseError('line %s: counts line needs vertex and face counts' % number)
    num_vertices, num_faces = counts[0], counts[1]

    if len(body) < num_vertices + num_faces:
        raise MeshParseError('expected %s vertices and %s faces, file ends after %s records' %
                             (num_vertices, num_faces, len(body)))

    vertices = []
    for number, tokens in body[:num_vertices]:
        coords = _floats(tokens, number)
        if len(coords) < 3:
            raise MeshParseError('line %s: vertex needs three coordinates' % number)
        vertices.append(coords[:3])

    triangles = []
    for number, tokens in body[num_vertices:num_vertices + num_faces]:
        face = _ints(tokens, number)
        if face[0] != 3 or len(face) < 4:
            raise MeshParseError('line %s: only triangular faces are supported' % number)
        triangles.append(face[1:4])

    return vertices, triangles


def parse_obj(lines):
    """
    Parse the OBJ subset: `v x y z` and triangular `f i j k` (1-based).

    :param lines: The file lines.
    :type lines: list
    :return: Vertices and 0-based triangles.
    :rtype: tuple
    """
    vertices = []
    triangles = []
    for number, tokens in _content_lines(lines):
        kind = tokens[0]
        if kind == 'v':
            coords = _floats(tokens[1:], number)
            if len(coords) < 3:
                raise MeshParseError('line %s: vertex needs three coordinates' % number)
            vertices.append(coords[:3])
        elif kind == 'f':
            refs = [t.split('/')[0] for t in tokens[1:]]
            if len(refs) != 3:
                raise MeshParseError('line %s: only triangular faces are supported' % number)
            triangles.append([i - 1 for i in _ints(refs, number)])
    return vertices, triangles


def load_mesh(path, fmt=None):
    """
    Load and validate a triangle mesh.

    :param path: The mesh file.
    :type path: str
    :param fmt: 'off' or 'obj'; taken from the extension if None.
    :type fmt: str
    :rtype: SurfaceMesh
    """
    fmt = _format_from_path(path, fmt)
    if not os.path.isfile(path):
        raise MeshParseError('mesh file `%s` not found' % path)

    try:
        lines = file_handler.reader(path, strict=True)
    except file_handler.FileHandlerError as e:
        raise MeshParseError(str(e))
    if fmt == 'off':
        vertices, triangles = parse_off(lines)
    else:
        vertices, triangles = parse_obj(lines)

    mesh = SurfaceMesh(vertices, triangles)
    log.info('loaded %s: N=%s M=%s' % (path, mesh.num_triangles, mesh.num_vertices))
    return mesh


def save_mesh(path, mesh, fmt=None):
    """
    Write a mesh as OFF or OBJ.

    :param path: The target file.
    :type path: str
    :param mesh: The mesh.
    :type mesh: SurfaceMesh
    :param fmt: 'off' or 'obj'; taken from the extension if None.
    :type fmt: str
    """
    fmt = _format_from_path(path, fmt)
    if fmt == 'off':
        file_handler.write_off(path, mesh.vertices, mesh.triangles)
    else:
        file_handler.write_obj(path, mesh.vertices, mesh.triangles)
