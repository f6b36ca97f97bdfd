"""Fuglede-Kadison determinant on square complex matrices.

For an n x n matrix this is the geometric mean of the singular values,
equivalently |det A|^(1/n). Singular inputs (smallest singular value at
or below singular_tol relative to the largest) evaluate to 0 with
log value -inf, matching the analytic extension to singular operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegularityError
from .linalg import DEFAULT_TOL, ToleranceConfig, is_pd, require_hermitian, require_square


@dataclass(frozen=True)
class FKValue:
    """Determinant value together with its logarithm (-inf when zero)."""

    value: float
    log_value: float

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise ValueError("determinant value must be nonnegative")
        if math.isinf(self.log_value):
            if self.value != 0.0:
                raise ValueError("log_value -inf requires value 0")
        elif not math.isclose(self.value, math.exp(self.log_value), rel_tol=1e-12):
            raise ValueError("value and log_value disagree")

    @property
    def is_zero(self) -> bool:
        return self.value == 0.0


def fk_det(A, tol: ToleranceConfig = DEFAULT_TOL) -> FKValue:
    """Geometric mean of the singular values of a square matrix."""
    M = require_square(A)
    sv = np.linalg.svd(M, compute_uv=False)
    smax = float(sv[0])
    if smax == 0.0 or float(sv[-1]) <= tol.singular_tol * smax:
        return FKValue(0.0, -math.inf)
    logv = float(np.mean(np.log(sv)))
    return FKValue(math.exp(logv), logv)


def fk_log_det(A, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    return fk_det(A, tol).log_value


def fk_det_ratio(A, B, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """det(A + B) / det(A) for positive-definite A and PSD B.

    Evaluated as exp(log det(A+B) - log det(A)) so that spectra spanning
    many orders of magnitude neither overflow nor underflow.
    """
    MA = require_hermitian(A, tol)
    if not is_pd(MA, tol):
        raise RegularityError("ratio base must be positive-definite")
    MB = require_hermitian(B, tol)
    num = fk_det(MA + MB, tol)
    den = fk_det(MA, tol)
    return math.exp(num.log_value - den.log_value)
