"""Run configuration: JSON documents with an explicit schema version"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from palintoep.ensemble import (
    DISTRIBUTIONS,
    EnsembleSpec,
    get_distribution,
    validate_spec,
)
from palintoep.estimation import Method
from palintoep.helper import ConfigError, DimensionError
from palintoep.helper.logging import LOGGER

SCHEMA_VERSION = 1
MAX_MOMENT_LIMIT = 12

_REQUIRED = ('schema_version', 'n', 'N', 'num_matrices', 'max_moment')
_OPTIONAL = (
    'distribution',
    'seed',
    'method',
    'fit_order',
    'weighted',
    'histogram',
    'outputs',
)
_HISTOGRAM_KEYS = ('bins', 'min', 'max')
_OUTPUT_KEYS = ('moments', 'report', 'histograms')
_DEFAULT_OUTPUTS = {'moments': 'moments.csv', 'report': 'report.json'}


@dataclass(frozen=True)
class HistogramSettings:
    bins: int = 120
    low: float = -6.0
    high: float = 6.0


@dataclass(frozen=True)
class OutputPaths:
    moments: Path
    report: Path | None = None
    histograms: Path | None = None

    def under(self, directory: Path) -> 'OutputPaths':
        """Same layout re-rooted below directory."""
        return OutputPaths(
            directory / self.moments,
            self.report and directory / self.report,
            self.histograms and directory / self.histograms,
        )

    def files(self) -> list[Path]:
        return [p for p in (self.moments, self.report) if p is not None]


@dataclass(frozen=True)
class RunConfig:
    """Validated simulation run."""

    n: int
    sizes: tuple[int, ...]
    num_matrices: tuple[int, ...]
    max_moment: int
    distribution: str = 'gaussian'
    seed: int = 0
    method: Method = Method.EIGENVALUES
    fit_order: int | None = None
    weighted: bool = False
    histogram: HistogramSettings | None = None
    outputs: OutputPaths = OutputPaths(Path('moments.csv'))
    document: dict | None = None

    def specs(self) -> list[EnsembleSpec]:
        distribution = get_distribution(self.distribution)
        return [
            EnsembleSpec(self.n, N, distribution, self.seed)
            for N in self.sizes
        ]


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return _is_int(value) or isinstance(value, float)


def _unknown(section: str, keys, allowed) -> list[str]:
    return [
        f"unknown key {section}{key!r}"
        for key in sorted(set(keys) - set(allowed))
    ]


def _check_sizes(document: dict, violations: list[str]) -> tuple[int, ...]:
    sizes = document.get('N')
    if not isinstance(sizes, list) or not sizes:
        violations.append("N must be a non-empty list of integers")
        return ()
    if not all(_is_int(N) for N in sizes):
        violations.append(f"N must hold integers, got {sizes}")
        return ()
    if len(set(sizes)) != len(sizes):
        violations.append(f"N values must be distinct, got {sizes}")
    n = document.get('n')
    if _is_int(n) and n >= 0:
        for N in sizes:
            try:
                validate_spec(n, N)
            except DimensionError as exc:
                violations.append(str(exc))
    return tuple(sorted(sizes))


def _check_counts(
    document: dict, sizes: tuple[int, ...], violations: list[str]
) -> tuple[int, ...]:
    counts = document.get('num_matrices')
    if _is_int(counts):
        counts = [counts] * len(sizes)
    elif isinstance(counts, list) and all(_is_int(c) for c in counts):
        if len(counts) != len(document.get('N') or ()):
            violations.append("num_matrices list must have one entry per N")
            return ()
        # align with the sorted N order
        paired = sorted(zip(document['N'], counts))
        counts = [c for _, c in paired]
    else:
        violations.append(
            "num_matrices must be an integer or a list of integers"
        )
        return ()
    for count in counts:
        if count < 2:
            violations.append(f"num_matrices must be >= 2, got {count}")
    return tuple(counts)


def _check_histogram(
    value: Any, violations: list[str]
) -> HistogramSettings | None:
    if value is None:
        return None
    if not isinstance(value, dict):
        violations.append("histogram must be an object or null")
        return None
    violations.extend(_unknown('histogram.', value, _HISTOGRAM_KEYS))
    defaults = HistogramSettings()
    bins = value.get('bins', defaults.bins)
    low = value.get('min', defaults.low)
    high = value.get('max', defaults.high)
    if not _is_int(bins) or bins < 1:
        violations.append(f"histogram.bins must be >= 1, got {bins!r}")
    if not (_is_number(low) and _is_number(high)) or not low < high:
        violations.append(
            f"histogram range must satisfy min < max, got [{low}, {high}]"
        )
    return HistogramSettings(bins, low, high)


def _check_outputs(value: Any, violations: list[str]) -> OutputPaths:
    if value is None:
        value = {}
    if not isinstance(value, dict):
        violations.append("outputs must be an object")
        value = {}
    violations.extend(_unknown('outputs.', value, _OUTPUT_KEYS))
    merged = {**_DEFAULT_OUTPUTS, **value}
    paths = {}
    for key in _OUTPUT_KEYS:
        path = merged.get(key)
        if path is not None and not isinstance(path, str):
            violations.append(f"outputs.{key} must be a path string")
            path = None
        paths[key] = Path(path) if path else None
    return OutputPaths(
        paths['moments'] or Path(_DEFAULT_OUTPUTS['moments']),
        paths['report'],
        paths['histograms'],
    )


def parse_config(document: Any) -> RunConfig:
    """Validate a decoded config document, reporting every violation."""
    if not isinstance(document, dict):
        raise ConfigError(["config must be a JSON object"])
    violations = _unknown('', document, _REQUIRED + _OPTIONAL)
    violations.extend(
        f"missing key {key!r}" for key in _REQUIRED if key not in document
    )

    version = document.get('schema_version')
    if 'schema_version' in document and (
        not _is_int(version) or version != SCHEMA_VERSION
    ):
        violations.append(
            f"schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    n = document.get('n')
    if 'n' in document and (not _is_int(n) or n < 0):
        violations.append(f"n must be an integer >= 0, got {n!r}")
    sizes = _check_sizes(document, violations) if 'N' in document else ()
    counts = ()
    if 'num_matrices' in document:
        counts = _check_counts(document, sizes, violations)

    max_moment = document.get('max_moment')
    if 'max_moment' in document:
        if not _is_int(max_moment):
            violations.append(
                f"max_moment must be an integer, got {max_moment!r}"
            )
        elif max_moment % 2:
            violations.append(f"max_moment must be even, got {max_moment}")
        elif not 2 <= max_moment <= MAX_MOMENT_LIMIT:
            violations.append(
                f"max_moment must lie in 2..{MAX_MOMENT_LIMIT}, "
                f"got {max_moment}"
            )

    distribution = document.get('distribution', 'gaussian')
    if distribution not in DISTRIBUTIONS:
        violations.append(
            f"unknown distribution {distribution!r}, "
            f"expected one of {DISTRIBUTIONS}"
        )
    seed = document.get('seed', 0)
    if not _is_int(seed) or not 0 <= seed < 2**64:
        violations.append(
            f"seed must be an unsigned 64-bit integer, got {seed!r}"
        )
    method = document.get('method', Method.EIGENVALUES.value)
    if method not in [m.value for m in Method]:
        violations.append(
            f"method must be 'eigenvalues' or 'trace', got {method!r}"
        )
    fit_order = document.get('fit_order')
    if fit_order is not None and (not _is_int(fit_order) or fit_order < 0):
        violations.append(
            f"fit_order must be null or an integer >= 0, got {fit_order!r}"
        )
    weighted = document.get('weighted', False)
    if not isinstance(weighted, bool):
        violations.append(f"weighted must be a boolean, got {weighted!r}")
    histogram = _check_histogram(document.get('histogram'), violations)
    outputs = _check_outputs(document.get('outputs'), violations)

    if violations:
        raise ConfigError(violations)
    return RunConfig(
        n,
        sizes,
        counts,
        max_moment,
        distribution,
        seed,
        Method(method),
        fit_order,
        weighted,
        histogram,
        outputs,
        document,
    )


def read_document(path: Path) -> dict:
    """Decode a config file, locating syntax errors by line and column."""
    LOGGER.info(f"Loading configuration {path}...")
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"])
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            [f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"]
        )
    return document


def load_config(path: Path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    return parse_config(read_document(path))
