"""Block-diagonal subalgebras of the n x n matrices and the positive maps
attached to them: pinching onto the diagonal blocks (the trace-preserving
conditional expectation), unitary mixings, and the trace map A -> tr(A) I.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import matio
from .errors import SpecificationError
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    frobenius,
    hermitize,
    normalized_trace,
    require_square,
)

WEIGHT_TOL = 1e-12
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class BlockPartition:
    """Ordered block sizes (n1, ..., nk) with n = sum ni.

    k = n is the diagonal subalgebra, k = 1 the full algebra.
    """

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.sizes:
            raise SpecificationError("partition must contain at least one block")
        if any(int(s) != s or s < 1 for s in self.sizes):
            raise SpecificationError(f"bad block sizes {self.sizes}")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def is_full(self) -> bool:
        return self.k == 1

    @property
    def is_diagonal(self) -> bool:
        return all(s == 1 for s in self.sizes)

    def slices(self) -> list[slice]:
        out, start = [], 0
        for s in self.sizes:
            out.append(slice(start, start + s))
            start += s
        return out

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.sizes)

    @classmethod
    def diagonal(cls, n: int) -> "BlockPartition":
        return cls((1,) * n)

    @classmethod
    def halves(cls, n: int) -> "BlockPartition":
        if n < 2:
            return cls((n,))
        return cls(((n + 1) // 2, n // 2))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "BlockPartition":
        """Parse ``2,2,3``; ``diag`` expands to (1,...,1), ``full`` to (n,)."""
        text = text.strip().lower()
        if text == "diag":
            if n is None:
                raise SpecificationError("'diag' partition needs the dimension")
            return cls.diagonal(n)
        if text == "full":
            if n is None:
                raise SpecificationError("'full' partition needs the dimension")
            return cls((n,))
        try:
            sizes = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise SpecificationError(f"bad partition {text!r}") from exc
        part = cls(sizes)
        if n is not None and part.total != n:
            raise SpecificationError(
                f"partition {text!r} sums to {part.total}, expected {n}"
            )
        return part


@functools.lru_cache(maxsize=256)
def _block_mask(sizes: tuple[int, ...]) -> np.ndarray:
    n = sum(sizes)
    mask = np.zeros((n, n))
    start = 0
    for s in sizes:
        mask[start : start + s, start : start + s] = 1.0
        start += s
    mask.setflags(write=False)
    return mask


def pinch(A, part: BlockPartition) -> np.ndarray:
    """Zero every entry outside the principal diagonal blocks.

    In-block entries are untouched bit for bit, so pinching is exactly
    idempotent and preserves the trace exactly.
    """
    M = require_square(A)
    if M.shape[0] != part.total:
        raise ValueError(
            f"matrix dimension {M.shape[0]} does not match partition total {part.total}"
        )
    return M * _block_mask(part.sizes)


def membership_residual(A, part: BlockPartition) -> float:
    """Relative Frobenius distance from A to its pinching."""
    M = require_square(A)
    return frobenius(M - pinch(M, part)) / max(1.0, frobenius(M))


def is_member(A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return membership_residual(A, part) <= tol.membership_tol


def blocks_of(A, part: BlockPartition) -> list[np.ndarray]:
    M = require_square(A)
    if M.shape[0] != part.total:
        raise ValueError("dimension mismatch")
    return [M[s, s] for s in part.slices()]


def block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    mats = [as_matrix(b) for b in blocks]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=np.complex128)
    start = 0
    for m in mats:
        s = m.shape[0]
        out[start : start + s, start : start + s] = m
        start += s
    return out


@dataclass(frozen=True)
class PositiveMapSpec:
    """A trace-preserving unital positive map on the n x n matrices.

    kind 'pinching'       -- conditional expectation onto a block partition
    kind 'unitary_mixing' -- A -> sum_i w_i U_i A U_i*
    kind 'trace_map'      -- A -> tr(A) I
    """

    kind: str
    partition: BlockPartition | None = None
    unitaries: tuple = ()
    weights: tuple = ()
    dim: int | None = None

    @classmethod
    def pinching(cls, part: BlockPartition) -> "PositiveMapSpec":
        return cls(kind="pinching", partition=part, dim=part.total)

    @classmethod
    def trace_map(cls, dim: int | None = None) -> "PositiveMapSpec":
        return cls(kind="trace_map", dim=dim)

    @classmethod
    def unitary_mixing(cls, pairs) -> "PositiveMapSpec":
        """pairs: iterable of (unitary, weight). Weights must sum to 1
        within 1e-12; they are renormalized afterwards so the map stays
        trace-preserving to rounding."""
        pairs = list(pairs)
        if not pairs:
            raise SpecificationError("mixing needs at least one unitary")
        us, ws = [], []
        n = as_matrix(pairs[0][0]).shape[0]
        for U, w in pairs:
            M = require_square(U)
            if M.shape[0] != n:
                raise SpecificationError("mixing unitaries must share one dimension")
            resid = frobenius(M.conj().T @ M - np.eye(n))
            if resid > UNITARY_TOL:
                raise SpecificationError(
                    f"matrix in mixing is not unitary (residual {resid:.3e})"
                )
            if w < 0:
                raise SpecificationError("mixing weights must be nonnegative")
            us.append(M)
            ws.append(float(w))
        total = sum(ws)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise SpecificationError(f"mixing weights sum to {total!r}, expected 1")
        ws = [w / total for w in ws]
        frozen = tuple(u.copy() for u in us)
        for u in frozen:
            u.setflags(write=False)
        return cls(kind="unitary_mixing", unitaries=frozen, weights=tuple(ws), dim=n)

    def describe(self) -> str:
        if self.kind == "pinching":
            return f"pinching[{self.partition}]"
        if self.kind == "unitary_mixing":
            return f"mixing[{len(self.unitaries)}]"
        return "trace_map"


def apply_map(A, spec: PositiveMapSpec) -> np.ndarray:
    """Apply a positive map spec. All kinds are unital, positive and
    trace-preserving."""
    M = require_square(A)
    if spec.kind == "pinching":
        return pinch(M, spec.partition)
    if spec.kind == "trace_map":
        return normalized_trace(M) * np.eye(M.shape[0], dtype=np.complex128)
    if spec.kind == "unitary_mixing":
        if M.shape[0] != spec.dim:
            raise ValueError("dimension mismatch with mixing unitaries")
        out = np.zeros_like(M)
        for U, w in zip(spec.unitaries, spec.weights):
            out += w * (U @ M @ U.conj().T)
        return out
    raise SpecificationError(f"unknown map kind {spec.kind!r}")


@dataclass
class AxiomCheck:
    """Outcome of a randomized axiom battery: max residual per axiom and
    a witness (matrix texts) for the first violation, if any."""

    name: str
    trials: int
    seed: int
    passed: bool
    residuals: dict = field(default_factory=dict)
    witness: dict | None = None


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def _random_member(rng: np.random.Generator, part: BlockPartition) -> np.ndarray:
    return block_diag([_ginibre(rng, s) for s in part.sizes])


def check_expectation_axioms(
    part: BlockPartition,
    trials: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> AxiomCheck:
    """Verify the conditional-expectation axioms of pinching on random
    inputs: linearity, unitality, positivity, the bimodule identity
    F(S1 R S2) = S1 F(R) S2, trace preservation and idempotence."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = part.total
    bimodule_tol = 1e-10
    residuals = {
        "linearity": 0.0,
        "unitality": 0.0,
        "positivity": 0.0,
        "bimodule": 0.0,
        "trace": 0.0,
        "idempotence": 0.0,
    }
    witness = None
    eye = np.eye(n, dtype=np.complex128)
    residuals["unitality"] = frobenius(pinch(eye, part) - eye)
    for t in range(trials):
        rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, t])
        R1 = _ginibre(rng, n)
        R2 = _ginibre(rng, n)
        S1 = _random_member(rng, part)
        S2 = _random_member(rng, part)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        beta = complex(rng.standard_normal(), rng.standard_normal())

        lin = frobenius(
            pinch(alpha * R1 + beta * R2, part)
            - (alpha * pinch(R1, part) + beta * pinch(R2, part))
        ) / max(1.0, frobenius(R1) + frobenius(R2))
        residuals["linearity"] = max(residuals["linearity"], lin)

        G = _ginibre(rng, n)
        psd_in = G @ G.conj().T
        w = np.linalg.eigvalsh(hermitize(pinch(psd_in, part)))
        pos = max(0.0, -float(w[0])) / max(1.0, float(np.max(np.abs(w))))
        residuals["positivity"] = max(residuals["positivity"], pos)

        bim = frobenius(pinch(S1 @ R1 @ S2, part) - S1 @ pinch(R1, part) @ S2) / max(
            1.0, frobenius(S1) * frobenius(R1) * frobenius(S2)
        )
        residuals["bimodule"] = max(residuals["bimodule"], bim)

        tr_resid = abs(normalized_trace(pinch(R1, part)) - normalized_trace(R1))
        residuals["trace"] = max(residuals["trace"], tr_resid)

        once = pinch(R1, part)
        idem = 0.0 if once.tobytes() == pinch(once, part).tobytes() else 1.0
        residuals["idempotence"] = max(residuals["idempotence"], idem)

        bad = (
            lin > bimodule_tol
            or pos > tol.psd_tol
            or bim > bimodule_tol
            or tr_resid != 0.0
            or idem != 0.0
        )
        if bad and witness is None:
            witness = {
                "trial": t,
                "R": matio.dumps_matrix(R1),
                "S1": matio.dumps_matrix(S1),
                "S2": matio.dumps_matrix(S2),
            }
    passed = (
        witness is None
        and residuals["unitality"] == 0.0
        and residuals["linearity"] <= bimodule_tol
        and residuals["bimodule"] <= bimodule_tol
    )
    return AxiomCheck(
        name=f"expectation_axioms[{part}]",
        trials=trials,
        seed=seed,
        passed=passed,
        residuals=residuals,
        witness=witness,
    )


def check_two_positivity(
    part: BlockPartition,
    trials: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> AxiomCheck:
    """Apply the pinching entrywise to the n x n blocks of random PSD
    2n x 2n matrices and confirm the result stays PSD."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = part.total
    min_eig = np.inf
    witness = None
    for t in range(trials):
        rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, t])
        G = _ginibre(rng, 2 * n)
        X = G @ G.conj().T
        Y = np.empty_like(X)
        for bi in range(2):
            for bj in range(2):
                Y[bi * n : (bi + 1) * n, bj * n : (bj + 1) * n] = pinch(
                    X[bi * n : (bi + 1) * n, bj * n : (bj + 1) * n], part
                )
        w = np.linalg.eigvalsh(hermitize(Y))
        scale = max(1.0, float(np.max(np.abs(w))))
        rel = float(w[0]) / scale
        min_eig = min(min_eig, rel)
        if rel < -tol.psd_tol and witness is None:
            witness = {"trial": t, "X": matio.dumps_matrix(X)}
    return AxiomCheck(
        name=f"two_positivity[{part}]",
        trials=trials,
        seed=seed,
        passed=witness is None,
        residuals={"min_relative_eigenvalue": float(min_eig)},
        witness=witness,
    )
