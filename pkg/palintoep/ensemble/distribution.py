"""Entry distributions: mean 0, variance 1, with raw moment tables"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from palintoep.helper import ConfigError, double_factorial

_SQRT3 = math.sqrt(3.0)


class DistributionKind(str, Enum):
    GAUSSIAN = 'gaussian'
    RADEMACHER = 'rademacher'
    UNIFORM = 'uniform'


@dataclass(frozen=True)
class EntryDistribution:
    """Law of the independent entries b_0, b_1, ..."""

    kind: DistributionKind = DistributionKind.GAUSSIAN

    @property
    def name(self) -> str:
        return self.kind.value

    def moment(self, k: int) -> Fraction:
        """k-th raw moment E[b^k].

        Exact (Fraction) for the Gaussian and Rademacher laws; the uniform
        law on [-sqrt 3, sqrt 3] has 3^(k/2)/(k+1), rational for even k.
        """
        if k < 0:
            raise ValueError(f"moment order must be >= 0, got {k}")
        if k % 2:
            return Fraction(0)
        match self.kind:
            case DistributionKind.GAUSSIAN:
                return Fraction(double_factorial(k - 1))
            case DistributionKind.RADEMACHER:
                return Fraction(1)
            case DistributionKind.UNIFORM:
                return Fraction(3 ** (k // 2), k + 1)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        match self.kind:
            case DistributionKind.GAUSSIAN:
                return rng.standard_normal(size)
            case DistributionKind.RADEMACHER:
                return rng.integers(0, 2, size=size) * 2.0 - 1.0
            case DistributionKind.UNIFORM:
                return rng.uniform(-_SQRT3, _SQRT3, size=size)


DISTRIBUTIONS = tuple(kind.value for kind in DistributionKind)


def get_distribution(name: str) -> EntryDistribution:
    """Look up a distribution by its command-line name."""
    try:
        return EntryDistribution(DistributionKind(name.lower()))
    except ValueError:
        raise ConfigError(
            [f"unknown distribution {name!r}, expected one of {DISTRIBUTIONS}"]
        )
