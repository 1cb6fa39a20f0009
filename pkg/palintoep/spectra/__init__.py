"""Spectra and normalized moments of ensemble members"""

from dataclasses import dataclass

import numpy as np

from palintoep.ensemble import PalindromicMatrix
from palintoep.helper import ConvergenceError
from palintoep.spectra.histogram import (
    Histogram,
    histogram,
    write_histogram,
)

__all__ = [
    'Histogram',
    'MomentVector',
    'Spectrum',
    'batched_eigenvalues',
    'eigenvalues_symmetric',
    'empirical_moments',
    'histogram',
    'moments_from_eigenvalues',
    'trace_power_moment',
    'trace_power_moments',
    'write_histogram',
]

# Residual contract of the eigensolver, relative to N max|a_ij| (trace)
# and N^2 max|a_ij|^2 (Frobenius).
RESIDUAL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues of one N x N matrix."""

    raw: np.ndarray

    @property
    def N(self) -> int:
        return len(self.raw)

    @property
    def normalized(self) -> np.ndarray:
        """Eigenvalues scaled by 1/sqrt(N)."""
        return self.raw / np.sqrt(self.N)


@dataclass(frozen=True)
class MomentVector:
    """M_k(A) = (1/N) sum (lambda_i / sqrt N)^k for k = 0..k_max."""

    values: np.ndarray

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def __len__(self) -> int:
        return len(self.values)

    @property
    def k_max(self) -> int:
        return len(self.values) - 1


def _as_array(matrix: PalindromicMatrix | np.ndarray) -> np.ndarray:
    if isinstance(matrix, PalindromicMatrix):
        return matrix.dense
    return np.asarray(matrix, dtype=np.float64)


def _check_residuals(dense: np.ndarray, eigenvalues: np.ndarray):
    """Trace and Frobenius identities, batched over leading axes."""
    N = dense.shape[-1]
    scale = np.abs(dense).max(axis=(-2, -1))
    trace = np.trace(dense, axis1=-2, axis2=-1)
    frobenius = np.square(dense).sum(axis=(-2, -1))
    trace_gap = np.abs(eigenvalues.sum(axis=-1) - trace)
    frobenius_gap = np.abs(np.square(eigenvalues).sum(axis=-1) - frobenius)
    bad = (trace_gap > RESIDUAL_TOLERANCE * N * scale) | (
        frobenius_gap > RESIDUAL_TOLERANCE * N**2 * scale**2
    )
    return np.atleast_1d(bad)


def eigenvalues_symmetric(matrix: PalindromicMatrix | np.ndarray) -> Spectrum:
    """All eigenvalues of a real symmetric matrix, ascending.

    LAPACK's symmetric driver (Householder tridiagonalization followed by
    an implicit QL/QR or divide-and-conquer sweep) does the work; the
    result is checked against the trace and Frobenius identities.
    """
    dense = _as_array(matrix)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ValueError(f"expected a square matrix, got {dense.shape}")
    if not np.array_equal(dense, dense.T):
        raise ValueError("matrix is not symmetric")
    try:
        eigenvalues = np.linalg.eigvalsh(dense)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}")
    if _check_residuals(dense, eigenvalues).any():
        raise ConvergenceError("eigenvalues violate the residual contract")
    return Spectrum(eigenvalues)


def batched_eigenvalues(
    dense: np.ndarray, first_index: int = 0
) -> np.ndarray:
    """Eigenvalues of a (batch, N, N) stack of symmetric matrices."""
    try:
        eigenvalues = np.linalg.eigvalsh(dense)
    except np.linalg.LinAlgError as exc:
        # locate the culprit for the error report
        for offset, single in enumerate(dense):
            try:
                np.linalg.eigvalsh(single)
            except np.linalg.LinAlgError:
                raise ConvergenceError(
                    f"eigensolver did not converge: {exc}",
                    sample_index=first_index + offset,
                )
        raise ConvergenceError(f"eigensolver did not converge: {exc}")
    bad = _check_residuals(dense, eigenvalues)
    if bad.any():
        raise ConvergenceError(
            "eigenvalues violate the residual contract",
            sample_index=first_index + int(np.argmax(bad)),
        )
    return eigenvalues


def moments_from_eigenvalues(
    eigenvalues: np.ndarray, k_max: int
) -> np.ndarray:
    """Normalized power sums along the last axis, orders 0..k_max."""
    N = eigenvalues.shape[-1]
    normalized = eigenvalues / np.sqrt(N)
    moments = np.empty(eigenvalues.shape[:-1] + (k_max + 1,))
    moments[..., 0] = 1.0
    power = np.ones_like(normalized)
    for k in range(1, k_max + 1):
        power = power * normalized
        moments[..., k] = power.sum(axis=-1) / N
    return moments


def empirical_moments(spectrum: Spectrum, k_max: int) -> MomentVector:
    """Moments of the normalized spectral measure of one matrix."""
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    return MomentVector(moments_from_eigenvalues(spectrum.raw, k_max))


def trace_power_moment(
    matrix: PalindromicMatrix | np.ndarray, k: int
) -> float:
    """trace(A^k) / N^(k/2 + 1) by repeated squaring, no eigensolver."""
    if k < 0:
        raise ValueError(f"power must be >= 0, got {k}")
    dense = _as_array(matrix)
    N = dense.shape[-1]
    power = np.linalg.matrix_power(dense, k)
    return float(np.trace(power, axis1=-2, axis2=-1) / N ** (k / 2 + 1))


def trace_power_moments(dense: np.ndarray, k_max: int) -> np.ndarray:
    """trace-path moments 0..k_max for a (batch, N, N) stack."""
    N = dense.shape[-1]
    moments = np.empty(dense.shape[:-2] + (k_max + 1,))
    moments[..., 0] = 1.0
    power = np.broadcast_to(np.eye(N), dense.shape)
    for k in range(1, k_max + 1):
        power = power @ dense
        moments[..., k] = np.trace(power, axis1=-2, axis2=-1) / N ** (
            k / 2 + 1
        )
    return moments
