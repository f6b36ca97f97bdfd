"""Seeded random generation of test instances and a gap-minimizing
falsification search.

Every trial draws its generator from the pair (seed, trial index), so
parallel trials are independent and runs are bitwise reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import SpecificationError
from .linalg import DEFAULT_TOL, ToleranceConfig, frobenius, hermitize
from .subalgebra import BlockPartition, block_diag, membership_residual

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    partition: BlockPartition
    spectrum_range: tuple[float, float] = (0.1, 10.0)
    rank: int | None = None
    seed: int = 0
    trials: int = 1

    def __post_init__(self) -> None:
        if not 1 <= self.n <= 32:
            raise SpecificationError(f"dimension {self.n} outside 1..32")
        lo, hi = self.spectrum_range
        if not (0.0 < lo <= hi):
            raise SpecificationError(f"bad spectrum range {self.spectrum_range}")
        if self.rank is not None and not 0 <= self.rank <= self.n:
            raise SpecificationError(f"rank {self.rank} outside 0..{self.n}")
        if self.partition.total != self.n:
            raise SpecificationError(
                f"partition total {self.partition.total} != dimension {self.n}"
            )


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed & _SEED_MASK, trial & _SEED_MASK])


def ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a complex Gaussian matrix with the diagonal phases pulled out,
    which makes the distribution rotation invariant."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    Z = ginibre(n, rng)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    ph = d / np.abs(d)
    return Q * ph


def hermitian_gaussian(n: int, rng: np.random.Generator) -> np.ndarray:
    """GUE-style Hermitian noise with unit Frobenius scale per entry."""
    return hermitize(ginibre(n, rng))


def _log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=size))


def random_pd(cfg: SamplerConfig, rng: np.random.Generator) -> np.ndarray:
    """U diag(s) U* with s log-uniform in the spectrum range."""
    lo, hi = cfg.spectrum_range
    s = _log_uniform(rng, lo, hi, cfg.n)
    U = haar_unitary(cfg.n, rng)
    return hermitize((U * s) @ U.conj().T)


def random_hermitian(cfg: SamplerConfig, rng: np.random.Generator) -> np.ndarray:
    """Hermitian with eigenvalue magnitudes log-uniform in the range and
    random signs."""
    lo, hi = cfg.spectrum_range
    s = _log_uniform(rng, lo, hi, cfg.n) * rng.choice([-1.0, 1.0], size=cfg.n)
    U = haar_unitary(cfg.n, rng)
    return hermitize((U * s) @ U.conj().T)


def random_psd_singular(cfg: SamplerConfig, rng: np.random.Generator) -> np.ndarray:
    """PSD with exactly n - rank zero eigenvalues (zeros by construction:
    the matrix is assembled from rank many spectral factors only)."""
    r = cfg.n if cfg.rank is None else cfg.rank
    if r == 0:
        return np.zeros((cfg.n, cfg.n), dtype=np.complex128)
    lo, hi = cfg.spectrum_range
    s = _log_uniform(rng, lo, hi, r)
    U = haar_unitary(cfg.n, rng)[:, :r]
    return hermitize((U * s) @ U.conj().T)


def random_member(
    cfg: SamplerConfig, rng: np.random.Generator, pd: bool = True
) -> np.ndarray:
    """Block-diagonal Hermitian (PD by default) inside the subalgebra."""
    blocks = []
    for size in cfg.partition.sizes:
        sub = replace(cfg, n=size, partition=BlockPartition((size,)))
        blocks.append(random_pd(sub, rng) if pd else random_hermitian(sub, rng))
    return block_diag(blocks)


def random_nonmember(
    cfg: SamplerConfig,
    rng: np.random.Generator,
    min_distance: float = 0.1,
    pd: bool = True,
    max_tries: int = 500,
) -> np.ndarray:
    """PD (or Hermitian) matrix whose relative distance to its pinching is
    at least min_distance."""
    if cfg.partition.is_full:
        raise SpecificationError("the full partition admits no non-member")
    for _ in range(max_tries):
        A = random_pd(cfg, rng) if pd else random_hermitian(cfg, rng)
        if membership_residual(A, cfg.partition) * max(1.0, frobenius(A)) >= (
            min_distance * frobenius(A)
        ):
            return A
    raise SpecificationError(
        f"could not draw a matrix {min_distance} away from the subalgebra"
    )


def random_mixing_pairs(
    n: int, k: int, rng: np.random.Generator
) -> list[tuple[np.ndarray, float]]:
    """k Haar unitaries with positive weights summing to 1."""
    raw = rng.uniform(0.1, 1.0, size=k)
    ws = raw / raw.sum()
    return [(haar_unitary(n, rng), float(w)) for w in ws]


HILL_LEVELS = 10
HILL_DECAY = 0.5
HILL_TRIES_PER_LEVEL = 8


def falsify(
    ineq_id: str,
    cfg: SamplerConfig,
    budget: int,
    tol: ToleranceConfig = DEFAULT_TOL,
    fn_text: str | None = None,
    mapspec=None,
):
    """Random restarts plus coordinate-perturbation hill climbing that
    minimizes the reported gap; returns the most negative-gap report with
    a full witness. Zero budget evaluates the seed instance only.
    """
    from .registry import evaluate_inputs, get_entry, witness_with_matrices

    entry = get_entry(ineq_id)
    rng = trial_rng(cfg.seed, 0x46414C53)
    fn = entry.resolve_fn(fn_text)

    def run(inputs):
        reports = evaluate_inputs(entry, inputs, tol)
        rep = min(reports, key=lambda r: r.gap)
        return rep

    inputs = entry.sample(cfg, rng, fn=fn, mapspec=mapspec)
    best_inputs = inputs
    best = run(inputs)
    evals = 1

    while evals < budget:
        inputs = entry.sample(cfg, rng, fn=fn, mapspec=mapspec)
        report = run(inputs)
        evals += 1
        if report.gap < best.gap:
            best, best_inputs = report, inputs
        scale = 0.25
        for _level in range(HILL_LEVELS):
            if evals >= budget:
                break
            improved = False
            for _try in range(HILL_TRIES_PER_LEVEL):
                if evals >= budget:
                    break
                cand = entry.perturb(inputs, scale, rng, cfg)
                cand_report = run(cand)
                evals += 1
                if cand_report.gap < report.gap:
                    inputs, report = cand, cand_report
                    improved = True
                    if report.gap < best.gap:
                        best, best_inputs = report, inputs
                    break
            if not improved:
                scale *= HILL_DECAY

    return witness_with_matrices(best, best_inputs, evals=evals, seed=cfg.seed)
