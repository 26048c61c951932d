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

"""Run configuration: what was asked for, with every default resolved."""
import os
from typing import Any

from attrs import define, field

from .._about import __git_sha1__, __title__, __version__
from ..errors import ConfigError
from ..utils import PathLike, read_json, write_json
from ..verify import Parameters

__all__ = ['Parameters', 'RunConfig', 'SUBCOMMANDS', 'write_version']

SUBCOMMANDS = ('filters', 'testset', 'maximal', 'verify', 'sweep', 'report')


def _check_subcommand(_, attribute, value: str) -> None:
    if value not in SUBCOMMANDS:
        raise ConfigError(f'unknown subcommand {value!r}, expected one of {", ".join(SUBCOMMANDS)}')


def _parameters(value: Parameters | dict[str, Any] | None) -> Parameters:
    if value is None:
        return Parameters()
    if isinstance(value, Parameters):
        return value
    return Parameters.from_dict(value)


@define(frozen=True)
class RunConfig:
    subcommand: str = field(validator=_check_subcommand)
    parameters: Parameters = field(factory=Parameters, converter=_parameters)
    inputs: tuple[str, ...] = field(factory=tuple, converter=lambda v: tuple(os.fspath(p) for p in v))
    output: str | None = None
    seed: int = 0
    threads: int = 1
    options: dict[str, Any] = field(factory=dict)
    """Subcommand specific choices such as the suites, operator or test set kind."""

    def to_dict(self) -> dict[str, Any]:
        return {
            'subcommand': self.subcommand,
            'parameters': self.parameters.to_dict(),
            'inputs': list(self.inputs),
            'output': self.output,
            'seed': self.seed,
            'threads': self.threads,
            'options': self.options,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> 'RunConfig':
        unknown = sorted(set(data) - {a.name for a in cls.__attrs_attrs__})
        if unknown:
            raise ConfigError(f'unknown run configuration keys: {", ".join(unknown)}')
        return cls(**data)

    def to_json(self, path: PathLike) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def from_json(cls, path: PathLike) -> 'RunConfig':
        data = read_json(path)
        if not isinstance(data, dict):
            raise ConfigError('a run configuration must be a JSON object')
        return cls.from_dict(data)


def write_version(path: PathLike) -> None:
    write_json(path, {'name': __title__, 'version': __version__, 'git_sha1': __git_sha1__})
