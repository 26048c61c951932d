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

"""Log-log charts and a markdown digest of sweep CSV files.

Charts are written as plain SVG so the output depends only on the input rows: the same
CSV always produces the same bytes.
"""
import logging
import math
import os
import re
import warnings
from typing import Any, Sequence
from xml.sax.saxutils import escape

from attrs import define, field

from ..errors import ConfigError, FitWarning
from ..utils import PathLike, ensure_dir, read_csv, read_json
from ..verify import SWEEP_COLUMNS, ExponentFit, fit_exponent

__all__ = ['Series', 'load_series', 'render_svg', 'write_report']

_log = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 72, 24, 40, 56
TICKS = 5


@define
class Series:
    operator: str
    family: str
    t: str
    deltas: list[float] = field(factory=list)
    ratios: list[float] = field(factory=list)
    bound: float | None = None

    @property
    def key(self) -> str:
        parts = [part for part in (self.operator, self.family, f't{self.t}' if self.t else '') if part]
        return re.sub(r'[^A-Za-z0-9_.-]+', '_', '-'.join(parts))

    @property
    def title(self) -> str:
        suffix = f', t = {self.t}' if self.t else ''
        if not self.family:
            return f'{self.operator}{suffix}'
        return f'{self.operator} on {self.family}{suffix}'

    def fit(self) -> ExponentFit | None:
        if len(self.deltas) < 3:
            return None
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', FitWarning)
            return fit_exponent(self.deltas, self.ratios)


def _number(value: str, column: str, path: PathLike) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f'{os.fspath(path)!r}: column {column!r} holds {value!r}, not a number') from None


def _bounds(path: PathLike, stem: str) -> dict[tuple[str, str, str], float]:
    sibling = os.path.splitext(os.fspath(path))[0] + '.json'
    if not os.path.exists(sibling):
        return {}
    data = read_json(sibling)
    audits = data.get('audits', [data]) if isinstance(data, dict) else []
    bounds = {}
    for audit in audits:
        if isinstance(audit, dict) and 'bound' in audit and 'operator' in audit:
            t = '' if audit.get('t') is None else str(audit['t'])
            bounds[(str(audit['operator']), str(audit.get('family', '')), t)] = float(audit['bound'])
    if isinstance(data, dict) and 'audits' not in data and 'bound' in data:
        # a single sweep: its CSV rows carry no operator column
        bounds[(stem, '', '')] = float(data['bound'])
    return bounds


def load_series(path: PathLike) -> list[Series]:
    """Group the rows of one sweep CSV into series, one per ``(operator, family, t)``."""
    rows = read_csv(path)
    if not rows:
        raise ConfigError(f'{os.fspath(path)!r} has no rows')
    missing = [column for column in ('delta', 'ratio') if column not in rows[0]]
    if missing:
        raise ConfigError(f'{os.fspath(path)!r} lacks the columns {", ".join(missing)}')

    stem = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    bounds = _bounds(path, stem)
    series: dict[tuple[str, str, str], Series] = {}
    for row in rows:
        key = (row.get('operator') or stem, row.get('family') or '', row.get('t') or '')
        if key not in series:
            series[key] = Series(*key, bound=bounds.get(key))
        delta, ratio = _number(row['delta'], 'delta', path), _number(row['ratio'], 'ratio', path)
        if not (delta > 0 and ratio > 0):
            raise ConfigError(f'{os.fspath(path)!r}: delta and ratio must be positive, got {delta} and {ratio}')
        series[key].deltas.append(delta)
        series[key].ratios.append(ratio)
    return list(series.values())


def _span(values: Sequence[float]) -> tuple[float, float]:
    low, high = min(values), max(values)
    if high - low < 1e-9:
        return low - 0.5, high + 0.5
    pad = 0.05 * (high - low)
    return low - pad, high + pad


def render_svg(series: Series) -> str:
    xs = [math.log10(1.0 / d) for d in series.deltas]
    ys = [math.log10(r) for r in series.ratios]
    fit = series.fit()

    # the bound line passes through the point with the largest delta
    first = min(range(len(xs)), key=lambda i: xs[i])
    lines: list[tuple[str, float, str, float]] = []
    if fit is not None:
        lines.append(('fit', fit.slope, '6 4', fit.intercept / math.log(10)))
    if series.bound is not None:
        lines.append(('bound', series.bound, '2 4', ys[first] - series.bound * xs[first]))

    x_low, x_high = _span(xs)
    line_ys = [offset + slope * x for _, slope, _, offset in lines for x in (x_low, x_high)]
    y_low, y_high = _span(ys + line_ys)

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + (x - x_low) / (x_high - x_low) * plot_w

    def py(y: float) -> float:
        return MARGIN_TOP + (y_high - y) / (y_high - y_low) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">'
        f'{escape(series.title)}</text>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for i in range(TICKS):
        x = x_low + (x_high - x_low) * i / (TICKS - 1)
        y = y_low + (y_high - y_low) * i / (TICKS - 1)
        out.append(
            f'<text x="{px(x):.2f}" y="{HEIGHT - MARGIN_BOTTOM + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{10**x:.3g}</text>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{py(y) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{10**y:.3g}</text>'
        )
    out.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" '
        'font-size="12">1 / delta</text>'
    )
    out.append(
        f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.2f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.2f})">ratio</text>'
    )

    for name, slope, dash, offset in lines:
        start, end = offset + slope * x_low, offset + slope * x_high
        colour = '#1f77b4' if name == 'fit' else '#d62728'
        out.append(
            f'<line x1="{px(x_low):.2f}" y1="{py(start):.2f}" x2="{px(x_high):.2f}" y2="{py(end):.2f}" '
            f'stroke="{colour}" stroke-dasharray="{dash}"/>'
        )
        out.append(
            f'<text x="{px(x_high) - 4:.2f}" y="{py(end) - 6:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11" fill="{colour}">{name} slope {slope:.3f}</text>'
        )

    order = sorted(range(len(xs)), key=lambda i: xs[i])
    path = ' '.join(f'{px(xs[i]):.2f},{py(ys[i]):.2f}' for i in order)
    if len(order) > 1:
        out.append(f'<polyline points="{path}" fill="none" stroke="black"/>')
    for i in order:
        out.append(f'<circle cx="{px(xs[i]):.2f}" cy="{py(ys[i]):.2f}" r="3.5" fill="black"/>')
    out.append('</svg>')
    return '\n'.join(out) + '\n'


def _summary_line(series: Series) -> str:
    fit = series.fit()
    exponent = '-' if fit is None else f'{fit.slope:.4f}'
    residual = '-' if fit is None else f'{fit.residual:.4f}'
    bound = '-' if series.bound is None else f'{series.bound:.4f}'
    return f'| {series.operator} | {series.family or "-"} | {series.t or "-"} | {len(series.deltas)} | {exponent} | {residual} | {bound} |'


def write_report(paths: Sequence[PathLike], out_dir: PathLike) -> list[str]:
    """Write one SVG per series and ``summary.md``; returns the written paths."""
    if not paths:
        raise ConfigError('report needs at least one CSV file')
    ensure_dir(out_dir)
    series = [item for path in paths for item in load_series(path)]

    written = []
    for item in series:
        target = os.path.join(os.fspath(out_dir), f'{item.key}.svg')
        with open(target, 'w') as fp:
            fp.write(render_svg(item))
        written.append(target)

    lines = [
        '# Sweep report',
        '',
        '| operator | family | t | points | fitted exponent | residual | bound |',
        '| --- | --- | --- | --- | --- | --- | --- |',
    ]
    lines += [_summary_line(item) for item in series]
    lines += ['', 'Exponents are least squares slopes of log(ratio) against log(1/delta); fits need three points.', '']
    summary = os.path.join(os.fspath(out_dir), 'summary.md')
    with open(summary, 'w') as fp:
        fp.write('\n'.join(lines))
    written.append(summary)
    _log.info(f'report: {len(series)} series written to {os.fspath(out_dir)}')
    return written
