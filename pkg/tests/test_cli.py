import json

import pytest

from kakeya import ConfigError, SuiteResult
from kakeya.cli import RunConfig, Series, main, render_svg
from kakeya.cli import config as cli_config
from kakeya.utils import read_csv, read_json, write_csv
from kakeya.verify import params as verify_params

SWEEP_HEADER = ('delta', 'p', 'q', 'in_norm', 'out_norm', 'ratio')


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.delenv('KAKEYA_LAB_THREADS', raising=False)


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(['transmogrify']) == 1
    assert main(['verify', '--suite', 'everything']) == 1
    assert main(['--version']) == 0


def test_sweep_needs_three_deltas(tmp_path, params_file, capsys):
    out = tmp_path / 'sweep'
    code = main(['sweep', '--op', 'kakeya', '--deltas', '0.25', '0.125', '--params', str(params_file), '--out', str(out)])
    assert code == 1
    assert 'need >= 3 points' in capsys.readouterr().err
    assert (out / 'config.json').exists()


def test_bad_parameter_files(tmp_path, capsys):
    path = tmp_path / 'params.json'
    path.write_text(json.dumps({'colour': 'red'}))
    assert main(['filters', '--params', str(path), '--out', str(tmp_path / 'out')]) == 1
    assert 'unknown parameters' in capsys.readouterr().err


def test_verify_partition(tmp_path, params_file):
    out = tmp_path / 'verify'
    assert main(['verify', '--suite', 'partition', '--params', str(params_file), '--out', str(out)]) == 0
    for name in ('partition.csv', 'partition.json', 'config.json', 'version.json'):
        assert (out / name).exists()
    document = read_json(out / 'partition.json')
    assert document['passed'] is True and document['failures'] == []
    config = RunConfig.from_json(out / 'config.json')
    assert config.subcommand == 'verify'
    assert config.options == {'suites': ['partition']}
    assert read_json(out / 'version.json')['name'] == 'kakeya-lab'


def test_failing_suites_exit_with_two(tmp_path, params_file, monkeypatch, capsys):
    def failing(name, params, threads=None):
        return SuiteResult(name, ('check',), [('x',)], {}, [{'check': 'x', 'error': 1.0}])

    monkeypatch.setattr('kakeya.cli.app.run_suite', failing)
    code = main(['verify', '--suite', 'rotation', '--params', str(params_file), '--out', str(tmp_path / 'verify')])
    assert code == 2
    failures = json.loads(capsys.readouterr().out)
    assert failures == [{'suite': 'rotation', 'check': 'x', 'error': 1.0}]


def test_filters_table(tmp_path, params_file):
    out = tmp_path / 'filters'
    assert main(['filters', '--params', str(params_file), '--out', str(out), '--dump']) == 0
    lines = (out / 'filters.csv').read_text().splitlines()
    assert lines[0] == 'k,family,inner_radius,outer_radius,l1_mass'
    assert (out / 'kernels' / 'dyadic-0.field').exists()


def test_testset_and_maximal(tmp_path, params_file):
    sets = tmp_path / 'sets'
    assert main(['testset', '--kind', 'ball', '--repeat', '2', '--params', str(params_file), '--out', str(sets)]) == 0
    manifest = read_json(sets / 'manifest.json')
    assert [entry['file'] for entry in manifest['entries']] == ['ball-0.field', 'ball-1.field']

    out = tmp_path / 'hl'
    argv = ['maximal', '--op', 'hl', '--input', str(sets / 'ball-0.field'), '--csv', '--out', str(out)]
    assert main(argv + ['--params', str(params_file)]) == 0
    assert (out / 'hl.field').exists()
    assert (out / 'hl.csv').read_text().startswith('i0,i1,value')


def test_kakeya_over_directions(tmp_path, params_file):
    sets = tmp_path / 'sets'
    argv = ['testset', '--kind', 'tube', '--delta', '0.125', '--length', '1', '--params', str(params_file)]
    assert main(argv + ['--out', str(sets)]) == 0

    out = tmp_path / 'kakeya'
    argv = ['maximal', '--op', 'kakeya', '--input', str(sets / 'tube-0.field'), '--delta', '0.125', '--dirs', '8']
    assert main(argv + ['--params', str(params_file), '--out', str(out)]) == 0
    rows = read_csv(out / 'kakeya.csv')
    assert len(rows) == 8
    assert set(rows[0]) == {'omega_0', 'omega_1', 'weight', 'value'}
    # the direction along the tube sees it almost entirely; feathered edges cost a little
    assert 0.9 < max(float(row['value']) for row in rows) <= 1.0 + 1e-9


def test_missing_inputs(tmp_path, params_file, capsys):
    argv = ['maximal', '--op', 'hl', '--input', str(tmp_path / 'nothing.field'), '--params', str(params_file)]
    assert main(argv + ['--out', str(tmp_path / 'out')]) == 1
    assert 'kakeya-lab: error' in capsys.readouterr().err


def test_reports_are_reproducible(tmp_path):
    source = tmp_path / 'kakeya-ball.csv'
    rows = [(0.25, 2.0, 2.0, 1.0, 1.2, 1.2), (0.125, 2.0, 2.0, 1.0, 1.3, 1.3), (0.0625, 2.0, 2.0, 1.0, 1.35, 1.35)]
    write_csv(source, SWEEP_HEADER, rows)

    first, second = tmp_path / 'first', tmp_path / 'second'
    assert main(['report', str(source), '--out', str(first)]) == 0
    assert main(['report', str(source), '--out', str(second)]) == 0
    for name in ('kakeya-ball.svg', 'summary.md'):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert '| kakeya-ball |' in (first / 'summary.md').read_text()


def test_single_point_series_has_no_fit_line():
    svg = render_svg(Series('kakeya', 'ball', '', [0.25], [1.2]))
    assert '<line' not in svg
    assert svg.count('<circle') == 1


def test_run_config_round_trip(tmp_path, small_params):
    config = RunConfig('sweep', small_params, ['a.field'], 'out', 3, 2, {'op': 'kakeya'})
    path = tmp_path / 'config.json'
    config.to_json(path)
    assert RunConfig.from_json(path) == config
    with pytest.raises(ConfigError):
        RunConfig('transmogrify')


@pytest.mark.parametrize(
    'series, key, title',
    [
        (Series('kakeya', '', ''), 'kakeya', 'kakeya'),
        (Series('kakeya', 'ball', ''), 'kakeya-ball', 'kakeya on ball'),
        (Series('frozen', 'bandlimited_random', '0.5'), 'frozen-bandlimited_random-t0.5', 'frozen on bandlimited_random, t = 0.5'),
        (Series('frozen', '', 'ceiling'), 'frozen-tceiling', 'frozen, t = ceiling'),
    ],
)
def test_series_names(series, key, title):
    assert series.key == key
    assert series.title == title


def test_config_shares_the_parameter_record():
    assert cli_config.Parameters is verify_params.Parameters
