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

from typing import Callable, Iterator, Type, TypeVar

F = TypeVar('F', bound='Flags')

__all__ = ['Flags', 'Suites']


class flag:
    def __init__(self, func: Callable):
        self.value: int = func(None)
        self.name: str = func.__name__
        self.__doc__ = func.__doc__

    def __get__(self, instance: F | None, _: Type[F]) -> int | bool:
        return instance._has_flag(self.value) if instance else self.value

    def __set__(self, instance, value: bool) -> None:
        instance._overwrite_flag(flag=self.value, value=value)


class Flags:
    def __init__(self, **flags_named: bool) -> None:
        self._flag_overwrites: dict[int, bool] = {}

        for name, value in flags_named.items():
            if name.startswith('_'):
                raise AttributeError('Flags cannot be private')

            if not isinstance(self.__class__.__dict__.get(name), flag):
                raise AttributeError(f'Flag {repr(name)} does not exist')

            self._overwrite_flag(getattr(self.__class__, name), value)

    @classmethod
    def flag_names(cls) -> list[str]:
        return [name for name, value in vars(cls).items() if isinstance(value, flag)]

    @classmethod
    def all(cls: Type[F]) -> F:
        return cls(**{name: True for name in cls.flag_names()})

    def _has_flag(self, flag: int) -> bool:
        return self._flag_overwrites.get(flag, False)

    def _overwrite_flag(self, flag: int, value: bool) -> None:
        self._flag_overwrites[flag] = value

    @property
    def as_bit(self) -> int:
        return sum(value for value, enabled in self._flag_overwrites.items() if enabled)

    def __iter__(self) -> Iterator[str]:
        """Names of the enabled flags, in declaration order."""
        return (name for name in self.flag_names() if getattr(self, name))


class Suites(Flags):
    """Verification suites selected for one run."""

    @flag
    def partition(self) -> bool | int:
        return 1 << 0

    @flag
    def reconstruction(self) -> bool | int:
        return 1 << 1

    @flag
    def fixedpoint(self) -> bool | int:
        return 1 << 2

    @flag
    def decay31(self) -> bool | int:
        return 1 << 3

    @flag
    def decay32(self) -> bool | int:
        return 1 << 4

    @flag
    def rotation(self) -> bool | int:
        return 1 << 5

    @flag
    def bernstein(self) -> bool | int:
        return 1 << 6

    @flag
    def domination(self) -> bool | int:
        return 1 << 7

    @flag
    def sweep(self) -> bool | int:
        return 1 << 8
