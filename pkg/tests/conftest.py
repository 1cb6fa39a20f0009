import json
from pathlib import Path

import numpy as np
import pytest

from palintoep.ensemble import EnsembleSpec, build_matrix, sample_entries
from palintoep.helper import THREADS_ENV

DATA = Path(__file__).parent / 'data'


@pytest.fixture(autouse=True)
def _two_workers(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '2')


@pytest.fixture
def table2_csv() -> Path:
    """Moment table printed for n = 1 (stderr unknown, stored as 0)."""
    return DATA / 'table2.csv'


@pytest.fixture
def random_matrix():
    def _build(n: int, N: int, sample_index: int = 0, seed: int = 11):
        spec = EnsembleSpec(n, N, seed=seed)
        return build_matrix(spec, sample_entries(spec, sample_index))

    return _build


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def write_config(tmp_path):
    def _write(**overrides) -> Path:
        document = {
            'schema_version': 1,
            'n': 1,
            'N': [16, 32],
            'num_matrices': 50,
            'max_moment': 4,
            'seed': 3,
        }
        document.update(overrides)
        path = tmp_path / 'run.json'
        path.write_text(json.dumps(document, indent=2), encoding='utf-8')
        return path

    return _write
