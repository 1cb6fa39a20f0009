"""Report documents written by the command line"""

from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Iterable, Sequence

from palintoep.estimation import ExtrapolationFit, MomentTable, extrapolate
from palintoep.helper import FitError, dump_json
from palintoep.helper.logging import LOGGER
from palintoep.matchings import ConfigurationReport
from palintoep.matchings.formulas import (
    conjectured_moment,
    dpt_adjacent_contribution,
    fourth_moment_limit,
    lower_bound_moment,
    upper_bound_moment,
)
from palintoep.spectra.histogram import Histogram


def versions() -> dict[str, str]:
    """Installed versions of the package and its numerical stack."""
    found = {}
    for name in ('palintoep', 'numpy', 'scipy', 'pandas'):
        try:
            found[name] = version(name)
        except PackageNotFoundError:
            found[name] = 'unknown'
    return found


@dataclass
class ReportDocument:
    """Everything a simulate run produced, except timing."""

    config: dict
    moments: MomentTable
    fits: dict[int, ExtrapolationFit] = field(default_factory=dict)
    configurations: list[ConfigurationReport] = field(default_factory=list)
    histograms: dict[int, tuple[Path, Histogram]] = field(
        default_factory=dict
    )

    def to_dict(self) -> dict:
        return {
            'metadata': {'versions': versions()},
            'config': self.config,
            'moments': self.moments.records(),
            'fits': {
                str(k): fit.to_dict() for k, fit in sorted(self.fits.items())
            },
            'configurations': [
                report.to_dict() for report in self.configurations
            ],
            'histograms': {
                str(N): {
                    'path': str(path),
                    'bins': len(hist.counts),
                    'out_of_range': hist.out_of_range,
                }
                for N, (path, hist) in sorted(self.histograms.items())
            },
        }

    def write(self, path: Path):
        dump_json(self.to_dict(), path)


def fit_even_moments(
    table: MomentTable, order: int, weighted: bool = False
) -> dict[int, ExtrapolationFit]:
    """Extrapolated limit of every even moment the table can support."""
    fits = {}
    orders = sorted({k for row in table.rows.values() for k in row})
    for k in orders:
        if k % 2:
            continue
        try:
            fits[k] = table.fit(k, order, weighted)
        except FitError as exc:
            LOGGER.warning(f"Skipping fit of moment {k}: {exc}")
    return fits


def formula_rows(ms: Iterable[int], ns: Iterable[int]) -> list[dict]:
    """Closed-form catalog over the cross product of m and n."""
    rows = []
    for n in ns:
        for m in ms:
            row = {
                'm': m,
                'n': n,
                'moment': 2 * m,
                'fourth_moment_limit': float(fourth_moment_limit(n)),
                'upper_bound': upper_bound_moment(m, n),
                'lower_bound': float(lower_bound_moment(m, n, False)),
                'lower_bound_conjectured': float(
                    lower_bound_moment(m, n, True)
                ),
            }
            if n == 1:
                row['dpt_adjacent'] = float(dpt_adjacent_contribution(m))
                row['conjectured'] = float(conjectured_moment(m, n))
            rows.append(row)
    return rows


def configuration_rows(
    reports: Sequence[ConfigurationReport],
) -> list[dict]:
    """Contributions per matching across N, with a 1/N defect fit."""
    by_matching: dict = {}
    for report in reports:
        by_matching.setdefault(report.matching, []).append(report)
    rows = []
    for matching, group in by_matching.items():
        group = sorted(group, key=lambda r: r.N)
        row = {
            'matching': matching.as_lists(),
            'adjacent': matching.is_adjacent,
            'reports': [report.to_dict() for report in group],
        }
        if len(group) >= 2:
            points = [(r.N, r.relation_contribution) for r in group]
            fit = extrapolate(points, min(1, len(points) - 2))
            row['fit'] = fit.to_dict()
        rows.append(row)
    return rows


class OutputFiles:
    """Files of one command; all of them are removed if it fails."""

    def __init__(self):
        self.paths: list[Path] = []

    def add(self, path: Path) -> Path:
        self.paths.append(path)
        return path

    def __enter__(self) -> 'OutputFiles':
        return self

    def __exit__(self, exc_type, exc, traceback):
        if exc_type is None:
            return
        for path in self.paths:
            if path.exists():
                LOGGER.warning(f"Removing partial output {path}")
                path.unlink()
