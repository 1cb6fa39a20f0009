from pathlib import Path

import pytest

from palintoep.config import (
    HistogramSettings,
    OutputPaths,
    load_config,
    parse_config,
    read_document,
)
from palintoep.estimation import Method
from palintoep.helper import ConfigError


def violations_of(document) -> list[str]:
    with pytest.raises(ConfigError) as info:
        parse_config(document)
    return info.value.violations


def base(**overrides) -> dict:
    document = {
        'schema_version': 1,
        'n': 1,
        'N': [64, 16],
        'num_matrices': 100,
        'max_moment': 8,
    }
    document.update(overrides)
    return document


def test_valid_config():
    config = parse_config(base())
    assert config.sizes == (16, 64)
    assert config.num_matrices == (100, 100)
    assert config.distribution == 'gaussian'
    assert config.method == Method.EIGENVALUES
    assert config.histogram is None
    assert config.outputs.moments == Path('moments.csv')
    assert config.outputs.report == Path('report.json')
    assert [spec.N for spec in config.specs()] == [16, 64]


def test_per_size_counts_follow_sorted_sizes():
    config = parse_config(base(num_matrices=[10, 400]))
    assert config.num_matrices == (400, 10)


def test_optional_sections():
    config = parse_config(
        base(
            distribution='rademacher',
            seed=2**64 - 1,
            method='trace',
            fit_order=2,
            weighted=True,
            histogram={'bins': 40},
            outputs={'moments': 'm.csv', 'histograms': 'hist'},
        )
    )
    assert config.specs()[0].distribution.name == 'rademacher'
    assert config.method == Method.TRACE
    assert config.histogram == HistogramSettings(bins=40)
    assert config.outputs.histograms == Path('hist')
    outputs = config.outputs.under(Path('results'))
    assert outputs.moments == Path('results/m.csv')
    assert outputs.files() == [
        Path('results/m.csv'),
        Path('results/report.json'),
    ]


def test_size_not_multiple():
    assert violations_of(base(N=[6])) == [
        'N must be a multiple of 4 (2^(n+1) with n=1), got 6'
    ]


def test_odd_max_moment():
    assert violations_of(base(max_moment=7)) == [
        'max_moment must be even, got 7'
    ]


def test_max_moment_range():
    (violation,) = violations_of(base(max_moment=14))
    assert 'max_moment must lie in 2..12' in violation


def test_unknown_key():
    assert violations_of(base(sims=3)) == ["unknown key 'sims'"]


def test_too_few_matrices():
    assert violations_of(base(N=[16], num_matrices=0)) == [
        'num_matrices must be >= 2, got 0'
    ]


@pytest.mark.parametrize('version', [2, '1', True])
def test_schema_version(version):
    (violation,) = violations_of(base(schema_version=version))
    assert violation.startswith('schema_version must be 1')


def test_reports_every_violation():
    document = base(N=[6, 6], max_moment=7, seed=-1, method='qr')
    del document['n']
    violations = violations_of(document)
    assert "missing key 'n'" in violations
    assert 'N values must be distinct, got [6, 6]' in violations
    assert 'max_moment must be even, got 7' in violations
    assert any(v.startswith('seed') for v in violations)
    assert any(v.startswith('method') for v in violations)


def test_histogram_and_outputs_checked():
    violations = violations_of(
        base(
            histogram={'bins': 0, 'min': 2, 'max': 1, 'width': 3},
            outputs={'moments': 5},
        )
    )
    assert "unknown key histogram.'width'" in violations
    assert 'histogram.bins must be >= 1, got 0' in violations
    assert 'histogram range must satisfy min < max, got [2, 1]' in violations
    assert 'outputs.moments must be a path string' in violations


def test_not_an_object():
    assert violations_of([1, 2]) == ['config must be a JSON object']


def test_syntax_error_location(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{\n  "n": 1,\n  "N": [8,]\n}\n')
    with pytest.raises(ConfigError) as info:
        read_document(path)
    (violation,) = info.value.violations
    assert violation.startswith(f'{path}:3:')


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'absent.json')


def test_load_config(write_config):
    config = load_config(write_config(N=[8], max_moment=4))
    assert config.sizes == (8,)
    assert config.document['seed'] == 3


def test_output_paths_without_report():
    paths = OutputPaths(Path('m.csv'))
    assert paths.files() == [Path('m.csv')]
