# -*- coding: utf-8 -*-
# cython: language_level=3
# Copyright (c) 2023-present the kakeya-lab developers
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE

"""Binary and CSV serialization of fields.

The binary layout is one JSON header line ``{"dim": n, "N": N, "L": L}`` followed by
``N^n`` little-endian float64 values in C order.
"""
import csv
import json
import logging
import os
from typing import Union

import numpy as np

from ..errors import GridError
from .field import Field

__all__ = ['write_field', 'read_field', 'export_csv']

_log = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

_DTYPE = np.dtype('<f8')


def write_field(path: PathLike, field: Field) -> None:
    header = {'dim': field.dim, 'N': field.samples, 'L': field.side_length}
    with open(path, 'wb') as fp:
        fp.write(json.dumps(header, sort_keys=True).encode('utf-8') + b'\n')
        fp.write(np.ascontiguousarray(field.values, dtype=_DTYPE).tobytes())
    _log.debug(f'wrote field {header} to {os.fspath(path)!r}')


def read_field(path: PathLike) -> Field:
    with open(path, 'rb') as fp:
        line = fp.readline()
        payload = fp.read()

    try:
        header = json.loads(line.decode('utf-8'))
        dim, samples, side_length = int(header['dim']), int(header['N']), float(header['L'])
    except (ValueError, KeyError, TypeError) as exc:
        raise GridError(f'{os.fspath(path)!r} does not start with a field header') from exc

    expected = samples**dim * _DTYPE.itemsize
    if len(payload) != expected:
        raise GridError(f'{os.fspath(path)!r} holds {len(payload)} bytes of values, expected {expected}')

    values = np.frombuffer(payload, dtype=_DTYPE).reshape((samples,) * dim)
    return Field(values, side_length)


def export_csv(path: PathLike, field: Field) -> None:
    """One row per cell: the integer index columns, then the value."""
    index_columns = [f'i{axis}' for axis in range(field.dim)]
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp)
        writer.writerow(index_columns + ['value'])
        for index, value in np.ndenumerate(field.values):
            writer.writerow([*index, repr(float(value))])
