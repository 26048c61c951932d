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

"""The default parameter block shared by the verification suites and the command line."""
import math
from typing import Any

from attrs import asdict, define, evolve, field

from ..errors import ConfigError
from ..testsets import KINDS, TestSpec
from ..utils import PathLike, read_json
from .sweep import SweepSettings

__all__ = ['Parameters', 'DEFAULT_DELTAS', 'DEFAULT_FAMILIES']

DEFAULT_DELTAS = (2.0**-3, 2.0**-4, 2.0**-5, 2.0**-6, 2.0**-7)
DEFAULT_FAMILIES = ('bandlimited_random', 'bump_sum', 'ball')


def _floats(values) -> tuple[float, ...]:
    return tuple(float(value) for value in values)


def _check_families(_, attribute, value: tuple[str, ...]) -> None:
    unknown = [kind for kind in value if kind not in KINDS]
    if unknown:
        raise ConfigError(f'unknown test set kinds: {", ".join(unknown)}')


def _check_positive(_, attribute, value: float) -> None:
    if not value > 0:
        raise ConfigError(f'{attribute.name} must be positive, got {value}')


@define(frozen=True)
class Parameters:
    dim: int = 2
    samples: int = 256
    kernel_length: float = field(default=8.0, converter=float, validator=_check_positive)
    tube_length: float = field(default=1.0, converter=float, validator=_check_positive)
    eps: float = field(default=0.25, converter=float, validator=_check_positive)
    weight_power: float = field(default=2.0, converter=float, validator=_check_positive)
    p: float = field(default=2.0, converter=float, validator=_check_positive)
    q: float = field(default=2.0, converter=float, validator=_check_positive)
    r: float | None = None
    deltas: tuple[float, ...] = field(default=DEFAULT_DELTAS, converter=_floats)
    delta: float = 1.0 / 16
    seeds: int = 10
    families: tuple[str, ...] = field(default=DEFAULT_FAMILIES, converter=tuple, validator=_check_families)
    members: tuple[str, ...] | None = field(default=None, converter=lambda v: None if v is None else tuple(v))
    normalization: str = 'mass'
    sample_points: int = 1000
    max_rotations: int = 8
    t_low: float = 0.5
    cutoff: float = 1.0
    """Band limit of the ``bandlimited_random`` inputs."""
    bernstein_t: float = 1.0
    bernstein_seeds: int = 5
    property_fields: int = 100
    property_samples: int = 32
    slack: float = 0.2
    kakeya_slack: float = 0.15
    frozen_eps: float = 1.0 / 16
    frozen_r: float = 1.0
    strict_refinement: bool = False
    """Make the grid-doubling stability of decay and Bernstein ratios a pass criterion."""

    @property
    def r_value(self) -> float:
        return self.p / 2 if self.r is None else self.r

    @property
    def max_delta(self) -> float:
        return max(self.deltas)

    def family_spec(self, kind: str, seed: int = 0) -> TestSpec:
        """Input recipe for one family; band-limited inputs take the configured cutoff."""
        return TestSpec(kind, seed, cutoff=self.cutoff if kind == 'bandlimited_random' else None)

    def sweep_settings(self, **overrides: Any) -> SweepSettings:
        settings = SweepSettings(
            dim=self.dim,
            samples=self.samples,
            tube_length=self.tube_length,
            kernel_length=self.kernel_length,
            eps=self.eps,
            r=self.r_value,
            t_low=self.t_low,
            max_rotations=self.max_rotations,
            normalization=self.normalization,
            slack=self.slack,
        )
        return evolve(settings, **overrides)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data['deltas'] = list(self.deltas)
        data['families'] = list(self.families)
        data['members'] = None if self.members is None else list(self.members)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> 'Parameters':
        known = {a.name for a in cls.__attrs_attrs__}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f'unknown parameters: {", ".join(unknown)}')
        try:
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f'invalid parameter block: {exc}') from exc

    @classmethod
    def from_json(cls, path: PathLike) -> 'Parameters':
        data = read_json(path)
        if not isinstance(data, dict):
            raise ConfigError('a parameter file must hold a JSON object')
        return cls.from_dict(data)

    def __attrs_post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ConfigError(f'dim must be 2 or 3, got {self.dim}')
        if not 0 < self.r_value < self.p:
            raise ConfigError(f'r must lie in (0, p), got {self.r_value}')
        if any(not 0 < delta < 1 for delta in self.deltas) or not 0 < self.delta < 1:
            raise ConfigError('every delta must lie in (0, 1)')
        if math.isinf(self.p):
            raise ConfigError('p must be finite')
