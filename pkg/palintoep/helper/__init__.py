"""Shared errors and plumbing"""

import json
import os
from pathlib import Path
from typing import Any

THREADS_ENV = 'PALINTOEP_THREADS'

# Enumerations above this many tuples are refused instead of truncated.
ENUMERATION_LIMIT = 10**9


class PalintoepError(Exception):
    """Root of every error raised by the library."""


class DimensionError(PalintoepError, ValueError):
    """Matrix dimension incompatible with the palindromicity degree."""


class ConfigError(PalintoepError):
    """Invalid run configuration, with every violation found."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__('; '.join(self.violations))

    def __reduce__(self):
        return type(self), (self.violations,)


class GuardError(PalintoepError):
    """An exhaustive enumeration would exceed its size guard."""

    def __init__(self, message: str, cost: int):
        self.message = message
        self.cost = cost
        super().__init__(f"{message} (estimated cost {cost} tuples)")

    def __reduce__(self):
        return type(self), (self.message, self.cost)


class ConvergenceError(PalintoepError):
    """The eigensolver failed or violated its residual contract."""

    def __init__(self, message: str, sample_index: int | None = None):
        self.sample_index = sample_index
        self.message = message
        if sample_index is not None:
            message = f"{message} (sample {sample_index})"
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.message, self.sample_index)


class FitError(PalintoepError):
    """Least-squares extrapolation cannot be carried out."""


def worker_count() -> int:
    """Number of Monte Carlo workers, capped by PALINTOEP_THREADS."""
    available = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return available
    try:
        requested = int(raw)
    except ValueError:
        raise ConfigError([f"{THREADS_ENV} must be an integer, got {raw!r}"])
    if requested < 1:
        raise ConfigError([f"{THREADS_ENV} must be >= 1, got {requested}"])
    return requested


def double_factorial(r: int) -> int:
    """r!! = r (r-2) (r-4) ... down to 1 or 2; (-1)!! = 1."""
    if r < -1:
        raise ValueError(f"double factorial needs r >= -1, got {r}")
    result = 1
    while r > 1:
        result *= r
        r -= 2
    return result


def dump_json(document: Any, path: Path | None = None) -> str:
    """Serialize a report document; floats keep their shortest repr."""
    text = json.dumps(document, indent=2, allow_nan=False) + '\n'
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
    return text
