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

import asyncio
import logging
import os
from typing import Callable, Sequence, TypeVar

from ..errors import ConfigError
from .concurrer import Concurrer

__all__ = ['Orchestrator', 'resolve_threads', 'THREADS_ENV']

_log = logging.getLogger(__name__)

T = TypeVar('T')

THREADS_ENV = 'KAKEYA_LAB_THREADS'


def resolve_threads(requested: int | None = None) -> int:
    """Thread count: the environment override, then ``requested``, then 1."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(f'{THREADS_ENV} must be an integer, got {raw!r}') from None
    else:
        threads = 1 if requested is None else requested

    if threads < 1:
        raise ConfigError(f'thread count must be at least 1, got {threads}')
    return threads


class Orchestrator:
    """Runs independent jobs on worker threads and hands results back in submission order."""

    def __init__(self, threads: int | None = None) -> None:
        self.threads: int = resolve_threads(threads)

    def run(self, jobs: Sequence[Callable[[], T]]) -> list[T]:
        if not jobs:
            return []
        if self.threads == 1 or len(jobs) == 1:
            return [job() for job in jobs]

        _log.debug(f'orchestrating {len(jobs)} jobs on {self.threads} threads')
        return asyncio.run(self.orchestrate(jobs))

    async def orchestrate(self, jobs: Sequence[Callable[[], T]]) -> list[T]:
        gate = Concurrer(self.threads)

        async def guarded(job: Callable[[], T]) -> T:
            async with gate:
                return await asyncio.to_thread(job)

        return list(await asyncio.gather(*(guarded(job) for job in jobs)))
