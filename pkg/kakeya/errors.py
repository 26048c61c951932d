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

"""Exceptions and warnings raised by kakeya-lab."""
from typing import Any

__all__ = [
    'KakeyaError',
    'GridError',
    'ResolutionError',
    'RegimeError',
    'BandLimitError',
    'ToleranceError',
    'FitError',
    'ConfigError',
    'DomainError',
    'KakeyaWarning',
    'ResolutionWarning',
    'PeriodizationWarning',
    'RegimeWarning',
    'FitWarning',
]


class KakeyaError(Exception):
    """Base class of every error raised by this library."""


class GridError(KakeyaError, ValueError):
    """The grid is unsupported or two fields do not share a grid."""


class ResolutionError(KakeyaError, ValueError):
    """A geometric or spectral scale cannot be represented on the grid."""


class RegimeError(KakeyaError, ValueError):
    """Parameters fall outside the regime an identity or bound is stated for."""


class BandLimitError(KakeyaError, ValueError):
    """A field carries spectral mass outside the band it is required to live in."""


class ToleranceError(KakeyaError):
    """An exact identity or an empirical check failed beyond its tolerance.

    Attributes
    ----------
    failures: list[dict[str, Any]]
        Machine readable description of every failing item.
    """

    def __init__(self, message: str, failures: list[dict[str, Any]] | None = None) -> None:
        super().__init__(message)
        self.failures: list[dict[str, Any]] = failures or []


class FitError(KakeyaError, ValueError):
    """A log-log fit was requested on too few or degenerate points."""


class ConfigError(KakeyaError, ValueError):
    """A parameter block or run configuration is invalid."""


class DomainError(KakeyaError, ValueError):
    """An argument lies outside the domain of an operation, e.g. ``p <= 0`` or ``t <= 0``."""


class KakeyaWarning(UserWarning):
    """Base class of numerical diagnostics."""


class ResolutionWarning(KakeyaWarning):
    """A symbol is not negligible at the grid's Nyquist shell."""


class PeriodizationWarning(KakeyaWarning):
    """A kernel tail wraps around the torus above the contamination threshold."""


class RegimeWarning(KakeyaWarning):
    """A computation runs outside the regime its bound is stated for."""


class FitWarning(KakeyaWarning):
    """A fitted exponent has a residual too large to be trusted."""
