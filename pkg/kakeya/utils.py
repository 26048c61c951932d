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

import csv
import json
import math
import os
from typing import Any, Iterable, Sequence, Union

import numpy as np

from .errors import ConfigError

__all__ = ['PathLike', 'ensure_dir', 'write_json', 'read_json', 'write_csv', 'read_csv']

PathLike = Union[str, os.PathLike]


def _plain(value: Any) -> Any:
    # numpy scalars and arrays, and non-finite floats, are not JSON
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def ensure_dir(path: PathLike) -> str:
    os.makedirs(path, exist_ok=True)
    return os.fspath(path)


def write_json(path: PathLike, data: Any) -> None:
    with open(path, 'w') as fp:
        json.dump(_plain(data), fp, indent=2, sort_keys=True)
        fp.write('\n')


def read_json(path: PathLike) -> Any:
    with open(path) as fp:
        try:
            return json.load(fp)
        except json.JSONDecodeError as exc:
            raise ConfigError(f'{os.fspath(path)!r} is not valid JSON: {exc}') from exc


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])


def read_csv(path: PathLike) -> list[dict[str, str]]:
    with open(path, newline='') as fp:
        return list(csv.DictReader(fp))
