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

from asyncio import AbstractEventLoop, Future, get_running_loop

import typing_extensions

from ..errors import DomainError

__all__ = ['Concurrer']


class Concurrer:
    """Slot limiter: at most ``concurrency`` holders at once, waiters served first come first served."""

    def __init__(self, concurrency: int) -> None:
        if concurrency < 1:
            raise DomainError(f'concurrency must be at least 1, got {concurrency}')
        self.concurrency: int = concurrency

        self.current: int = self.concurrency
        self._reserved: list[Future] = []
        self.loop: AbstractEventLoop = get_running_loop()

    async def __aenter__(self) -> typing_extensions.Self:
        while self.current == 0:
            future = self.loop.create_future()
            self._reserved.append(future)
            await future

        self.current -= 1
        return self

    async def __aexit__(self, *_) -> None:
        self.release()

    def release(self) -> None:
        self.current = min(self.current + 1, self.concurrency)

        while self._reserved:
            future = self._reserved.pop(0)
            if not future.done():
                future.set_result(None)
                break
