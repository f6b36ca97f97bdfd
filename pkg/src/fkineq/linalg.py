"""Dense complex linear algebra kernel.

Hermitian eigendecomposition, functional calculus, positivity tests,
normalized trace and Schur complements, shared by every other module.
Everything here is a pure function of its inputs; nothing keeps global
state, so values are safe to share across worker threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DomainError,
    HermiticityError,
    IllConditionedError,
    NumericalFailureError,
    RegularityError,
)

# Condition-number policy: beyond COND_CAP a verifier refuses the trial
# outright; between COND_RESAMPLE and COND_CAP trial runners draw a fresh
# instance instead of reporting a possibly garbage gap.
COND_CAP = 1e12
COND_RESAMPLE = 1e6

# Eigendecomposition reconstruction residual accepted as "converged".
RECONSTRUCTION_TOL = 1e-10


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative, dimensionless tolerances. All must lie in [0, 1e-3]."""

    hermiticity_tol: float = 1e-10
    psd_tol: float = 1e-10
    singular_tol: float = 1e-12
    equality_tol: float = 1e-9
    membership_tol: float = 1e-8
    violation_tol: float = 1e-9

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if not 0.0 <= value <= 1e-3:
                raise ValueError(f"{name}={value!r} outside [0, 1e-3]")
        if self.equality_tol > self.violation_tol:
            raise ValueError("equality_tol must not exceed violation_tol")


DEFAULT_TOL = ToleranceConfig()


class Spectrum(NamedTuple):
    """Eigenvalues in ascending order with the unitary of eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(A) -> np.ndarray:
    """Coerce to a finite complex 2-d array."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise ValueError("matrix entries must be finite")
    return M


def require_square(A) -> np.ndarray:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def frobenius(A) -> float:
    return float(np.linalg.norm(np.asarray(A)))


def hermitize(A) -> np.ndarray:
    """Project onto the Hermitian part (A + A*)/2."""
    M = as_matrix(A)
    return (M + M.conj().T) / 2.0


def hermiticity_residual(A) -> float:
    """Relative Frobenius distance from A to its Hermitian part."""
    M = require_square(A)
    return frobenius(M - M.conj().T) / max(1.0, frobenius(M))


def require_hermitian(A, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    M = require_square(A)
    resid = hermiticity_residual(M)
    if resid > tol.hermiticity_tol:
        raise HermiticityError(
            f"matrix is not Hermitian: relative residual {resid:.3e}"
        )
    return M


def eig_hermitian(A, tol: ToleranceConfig = DEFAULT_TOL) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix.

    Returns eigenvalues ascending and a unitary of eigenvectors such that
    U diag(w) U* reconstructs A within RECONSTRUCTION_TOL relative.
    """
    M = require_hermitian(A, tol)
    try:
        w, U = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver failed: {exc}") from exc
    recon = (U * w) @ U.conj().T
    resid = frobenius(recon - M) / max(1.0, frobenius(M))
    if resid > RECONSTRUCTION_TOL:
        raise NumericalFailureError(
            f"eigendecomposition reconstruction residual {resid:.3e}"
        )
    return Spectrum(w, U)


def spectral_norm(A, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Operator 2-norm; uses the Hermitian eigenvalues when applicable."""
    M = require_square(A)
    if hermiticity_residual(M) <= tol.hermiticity_tol:
        w = np.linalg.eigvalsh(hermitize(M))
        return float(np.max(np.abs(w))) if w.size else 0.0
    return float(np.linalg.norm(M, 2))


def apply_fn(
    A,
    f: Callable[[np.ndarray], np.ndarray],
    domain: tuple[float, float] = (-np.inf, np.inf),
    open_lo: bool = False,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> np.ndarray:
    """Continuous functional calculus U diag(f(w)) U* for Hermitian A.

    Eigenvalues straying below/above a closed domain edge by at most
    psd_tol * max(1, ||A||) are clamped onto the edge; anything worse
    raises DomainError carrying the offending eigenvalue. An open lower
    edge admits no clamping.
    """
    w, U = eig_hermitian(A, tol)
    lo, hi = domain
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    slack = tol.psd_tol * scale
    w_eff = w.copy()
    for i, x in enumerate(w):
        if open_lo:
            if x <= lo:
                raise DomainError(
                    f"eigenvalue {x!r} outside open domain ({lo}, {hi}]",
                    eigenvalue=float(x),
                )
        elif x < lo:
            if lo - x <= slack:
                w_eff[i] = lo
            else:
                raise DomainError(
                    f"eigenvalue {x!r} below domain [{lo}, {hi}]",
                    eigenvalue=float(x),
                )
        if x > hi:
            if x - hi <= slack:
                w_eff[i] = hi
            else:
                raise DomainError(
                    f"eigenvalue {x!r} above domain [{lo}, {hi}]",
                    eigenvalue=float(x),
                )
    vals = np.asarray(f(w_eff), dtype=np.float64)
    if vals.shape != w_eff.shape:
        vals = np.array([float(f(x)) for x in w_eff], dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        bad = w_eff[~np.isfinite(vals)][0]
        raise DomainError(
            f"function not finite at eigenvalue {bad!r}", eigenvalue=float(bad)
        )
    return hermitize((U * vals) @ U.conj().T)


def is_psd(A, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    M = require_hermitian(A, tol)
    w = np.linalg.eigvalsh(M)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return bool(w.size == 0 or w[0] >= -tol.psd_tol * scale)


def is_pd(A, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    M = require_hermitian(A, tol)
    w = np.linalg.eigvalsh(M)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return bool(w.size > 0 and w[0] >= tol.psd_tol * scale)


def require_pd(A, tol: ToleranceConfig = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    M = require_hermitian(A, tol)
    if not is_pd(M, tol):
        raise RegularityError(f"{what} is not positive-definite")
    return M


def normalized_trace(A) -> complex:
    """Average of the diagonal entries; real for Hermitian input."""
    M = require_square(A)
    return complex(np.mean(np.diagonal(M)))


def condition_number(A) -> float:
    """2-norm condition number via singular values; inf when singular."""
    M = require_square(A)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[-1] == 0.0:
        return np.inf
    return float(sv[0] / sv[-1])


def check_condition(A, what: str = "matrix") -> float:
    """Condition number, rejecting the trial beyond the hard cap."""
    c = condition_number(A)
    if c > COND_CAP:
        raise IllConditionedError(
            f"ill-conditioned trial: cond({what}) = {c:.3e} > {COND_CAP:.0e}"
        )
    return c


def hermitian_inverse(A, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Inverse of a positive-definite matrix, re-Hermitized."""
    M = require_pd(A, tol)
    return hermitize(np.linalg.inv(M))


def psd_part(A, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Clamp negative eigenvalues to zero."""
    return apply_fn(A, lambda w: np.maximum(w, 0.0), tol=tol)


def psd_sqrt(A, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix (tiny negatives clamped)."""
    return apply_fn(A, lambda w: np.sqrt(np.maximum(w, 0.0)), tol=tol)


def schur_complement(
    P, m: int | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> np.ndarray:
    """C - B* A^{-1} B for the block matrix [[A, B], [B*, C]].

    The top-left block A must be positive-definite. With m omitted, the
    dimension must be even and is split in half.
    """
    M = require_hermitian(P, tol)
    dim = M.shape[0]
    if m is None:
        if dim % 2 != 0:
            raise ValueError("split point required for odd dimension")
        m = dim // 2
    if not 1 <= m < dim:
        raise ValueError(f"split point {m} outside 1..{dim - 1}")
    A = M[:m, :m]
    B = M[:m, m:]
    C = M[m:, m:]
    w = np.linalg.eigvalsh(hermitize(A))
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < tol.psd_tol * scale:
        raise RegularityError("top-left block is not positive-definite")
    X = np.linalg.solve(A, B)
    return hermitize(C - B.conj().T @ X)
