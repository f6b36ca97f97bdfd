"""Catalog of operator monotone / operator convex / log-convex scalar
functions, finite-atom integral representations, Loewner matrices and
sampling-based monotonicity/convexity certificates.

Linearity of a function is decided from its construction (catalog kind or
atom-free representation), never inferred numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matio
from .errors import DomainError, NumericalFailureError, SpecificationError
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    apply_fn,
    eig_hermitian,
    frobenius,
    hermitize,
    hermitian_inverse,
    spectral_norm,
)

# Two independent evaluation routes of a representation must agree to this.
ROUTE_AGREE_TOL = 1e-10


@dataclass(frozen=True)
class NamedFunction:
    """A scalar function with certified operator-theoretic flags."""

    name: str
    call: Callable
    domain: tuple[float, float] = (-np.inf, np.inf)
    open_lo: bool = False
    operator_monotone: bool = False
    operator_convex: bool = False
    log_convex: bool = False
    scalar_convex: bool = False
    positive_valued: bool = False
    slope: float | None = None
    intercept: float | None = None

    @property
    def is_linear(self) -> bool:
        return self.slope is not None

    @property
    def is_constant(self) -> bool:
        return self.slope == 0.0

    def __call__(self, t):
        return self.call(t)


def power(r: float) -> NamedFunction:
    """t^r for 0 < r <= 1 (operator monotone)."""
    if not 0.0 < r <= 1.0:
        raise SpecificationError(f"power exponent {r} outside (0, 1]")
    affine = r == 1.0
    return NamedFunction(
        name=f"power:{r:g}",
        call=lambda t: np.power(t, r),
        domain=(0.0, np.inf),
        operator_monotone=True,
        operator_convex=affine,
        scalar_convex=affine,
        positive_valued=True,
        slope=1.0 if affine else None,
        intercept=0.0 if affine else None,
    )


def log_fn() -> NamedFunction:
    return NamedFunction(
        name="log",
        call=np.log,
        domain=(0.0, np.inf),
        open_lo=True,
        operator_monotone=True,
    )


def log1p_fn() -> NamedFunction:
    return NamedFunction(
        name="log1p",
        call=np.log1p,
        domain=(0.0, np.inf),
        operator_monotone=True,
        positive_valued=True,
    )


def resolvent_frac(lam: float) -> NamedFunction:
    """t -> (lam+1) t / (lam + t), the building block of the monotone
    integral representation."""
    if lam <= 0:
        raise SpecificationError("resolvent parameter must be positive")
    return NamedFunction(
        name=f"resolvent:{lam:g}",
        call=lambda t: (lam + 1.0) * t / (lam + t),
        domain=(0.0, np.inf),
        operator_monotone=True,
        positive_valued=True,
    )


def inv_perturb() -> NamedFunction:
    """t -> (1 + 1/t)^(-1) = t / (t + 1)."""
    return NamedFunction(
        name="inv_perturb",
        call=lambda t: t / (t + 1.0),
        domain=(0.0, np.inf),
        operator_monotone=True,
        positive_valued=True,
    )


def reciprocal() -> NamedFunction:
    return NamedFunction(
        name="reciprocal",
        call=lambda t: 1.0 / t,
        domain=(0.0, np.inf),
        open_lo=True,
        operator_convex=True,
        log_convex=True,
        scalar_convex=True,
        positive_valued=True,
    )


def one_plus_inv() -> NamedFunction:
    """t -> 1 + 1/t = (t+1)/t (log-convex on (0, inf))."""
    return NamedFunction(
        name="one_plus_inv",
        call=lambda t: 1.0 + 1.0 / t,
        domain=(0.0, np.inf),
        open_lo=True,
        operator_convex=True,
        log_convex=True,
        scalar_convex=True,
        positive_valued=True,
    )


def linear(a: float, b: float) -> NamedFunction:
    constant = b == 0.0
    return NamedFunction(
        name=f"linear:{a:g}:{b:g}",
        call=lambda t: a + b * np.asarray(t, dtype=float),
        domain=(-np.inf, np.inf),
        operator_monotone=b >= 0.0,
        operator_convex=True,
        log_convex=constant and a > 0.0,
        scalar_convex=True,
        positive_valued=a > 0.0 and b >= 0.0 or (a == 0.0 and b > 0.0),
        slope=float(b),
        intercept=float(a),
    )


def square_fn() -> NamedFunction:
    return NamedFunction(
        name="square",
        call=np.square,
        domain=(-np.inf, np.inf),
        operator_convex=True,
        scalar_convex=True,
        positive_valued=True,
    )


def shift(f: "FunctionLike", eps: float) -> NamedFunction:
    """g(x) = f(x + eps): moves a function on (0, inf) onto [0, inf)."""
    if eps <= 0:
        raise SpecificationError("shift offset must be positive")
    lo, hi = domain_of(f)
    name = getattr(f, "name", function_name(f))
    return NamedFunction(
        name=f"shift:{name}:{eps:g}",
        call=lambda t: f(np.asarray(t, dtype=float) + eps),
        domain=(lo - eps, hi),
        open_lo=is_open_lo(f),
        operator_monotone=flags_of(f)["operator_monotone"],
        operator_convex=flags_of(f)["operator_convex"],
        log_convex=flags_of(f)["log_convex"],
        scalar_convex=flags_of(f)["scalar_convex"],
        positive_valued=flags_of(f)["positive_valued"],
        slope=linear_slope(f),
        intercept=None if linear_slope(f) is None else float(f(0.0)),
    )


@dataclass(frozen=True)
class MonotoneRep:
    """f(t) = a + b t + sum_j w_j (l_j + 1) t / (l_j + t) with b >= 0 and
    finitely many atoms (l_j > 0, w_j > 0); operator monotone on [0, inf)."""

    a: float
    b: float
    atoms: tuple = ()

    def __post_init__(self) -> None:
        if self.b < 0:
            raise SpecificationError("monotone representation needs b >= 0")
        for lam, w in self.atoms:
            if lam <= 0 or w <= 0:
                raise SpecificationError("atoms must have positive location and weight")
        object.__setattr__(
            self, "atoms", tuple((float(l), float(w)) for l, w in self.atoms)
        )

    @property
    def name(self) -> str:
        atoms = ",".join(f"({l:g},{w:g})" for l, w in self.atoms)
        return f"rep:[{self.a:g},{self.b:g};{atoms}]"

    @property
    def is_linear(self) -> bool:
        return not self.atoms

    @property
    def is_constant(self) -> bool:
        return self.is_linear and self.b == 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.a + self.b * t
        for lam, w in self.atoms:
            out = out + w * (lam + 1.0) * t / (lam + t)
        return out


@dataclass(frozen=True)
class ConvexRep:
    """f(t) = a + b t + c t^2 + sum_j w_j (l_j + 1) t^2 / (l_j + t) with
    c >= 0; operator convex on [0, inf)."""

    a: float
    b: float
    c: float
    atoms: tuple = ()

    def __post_init__(self) -> None:
        if self.c < 0:
            raise SpecificationError("convex representation needs c >= 0")
        for lam, w in self.atoms:
            if lam <= 0 or w <= 0:
                raise SpecificationError("atoms must have positive location and weight")
        object.__setattr__(
            self, "atoms", tuple((float(l), float(w)) for l, w in self.atoms)
        )

    @property
    def name(self) -> str:
        atoms = ",".join(f"({l:g},{w:g})" for l, w in self.atoms)
        return f"crep:[{self.a:g},{self.b:g},{self.c:g};{atoms}]"

    @property
    def is_linear(self) -> bool:
        return not self.atoms and self.c == 0.0

    @property
    def is_constant(self) -> bool:
        return self.is_linear and self.b == 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.a + self.b * t + self.c * t * t
        for lam, w in self.atoms:
            out = out + w * (lam + 1.0) * t * t / (lam + t)
        return out


FunctionLike = NamedFunction | MonotoneRep | ConvexRep


def function_name(f: FunctionLike) -> str:
    return f.name


def domain_of(f: FunctionLike) -> tuple[float, float]:
    if isinstance(f, NamedFunction):
        return f.domain
    return (0.0, np.inf)


def is_open_lo(f: FunctionLike) -> bool:
    return isinstance(f, NamedFunction) and f.open_lo


def linear_slope(f: FunctionLike) -> float | None:
    if isinstance(f, NamedFunction):
        return f.slope
    if f.is_linear:
        return f.b
    return None


def flags_of(f: FunctionLike) -> dict:
    if isinstance(f, NamedFunction):
        return {
            "operator_monotone": f.operator_monotone,
            "operator_convex": f.operator_convex,
            "log_convex": f.log_convex,
            "scalar_convex": f.scalar_convex,
            "positive_valued": f.positive_valued,
        }
    if isinstance(f, MonotoneRep):
        return {
            "operator_monotone": True,
            "operator_convex": f.is_linear,
            "log_convex": f.is_constant and f.a > 0,
            "scalar_convex": f.is_linear,
            "positive_valued": f.a >= 0 and (f.a > 0 or f.b > 0 or bool(f.atoms)),
        }
    if isinstance(f, ConvexRep):
        return {
            "operator_monotone": f.is_linear and f.b >= 0,
            "operator_convex": True,
            "log_convex": f.is_constant and f.a > 0,
            "scalar_convex": True,
            "positive_valued": f.a > 0 and f.b >= 0,
        }
    raise TypeError(f"not a function descriptor: {f!r}")


def eval_scalar(f: FunctionLike, t: float) -> float:
    lo, hi = domain_of(f)
    if is_open_lo(f):
        if t <= lo:
            raise DomainError(f"{t!r} outside open domain", eigenvalue=t)
    elif t < lo:
        raise DomainError(f"{t!r} below domain", eigenvalue=t)
    if t > hi:
        raise DomainError(f"{t!r} above domain", eigenvalue=t)
    return float(f(t))


def eval_on_matrix(f: FunctionLike, A, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Apply f to a Hermitian matrix through the eigendecomposition.

    Representations are additionally evaluated through their closed
    resolvent-sum form; the two routes must agree to ROUTE_AGREE_TOL
    relative or the evaluation is refused.
    """
    eig_route = apply_fn(A, f, domain=domain_of(f), open_lo=is_open_lo(f), tol=tol)
    if isinstance(f, (MonotoneRep, ConvexRep)):
        sum_route = _rep_sum_route(f, A, tol)
        resid = frobenius(eig_route - sum_route) / max(1.0, frobenius(eig_route))
        if resid > ROUTE_AGREE_TOL:
            raise NumericalFailureError(
                f"representation routes disagree: residual {resid:.3e}"
            )
    return eig_route


def _rep_sum_route(f, A, tol: ToleranceConfig) -> np.ndarray:
    M = hermitize(A)
    n = M.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    if isinstance(f, MonotoneRep):
        out = f.a * eye + f.b * M
        for lam, w in f.atoms:
            out = out + w * (lam + 1.0) * (M @ np.linalg.inv(lam * eye + M))
        return hermitize(out)
    out = f.a * eye + f.b * M + f.c * (M @ M)
    for lam, w in f.atoms:
        out = out + w * (lam + 1.0) * (M @ M @ np.linalg.inv(lam * eye + M))
    return hermitize(out)


def loewner_matrix(f: FunctionLike, points, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Divided-difference matrix [f(x_i) - f(x_j)] / (x_i - x_j) with
    central-difference derivatives on the diagonal; PSD exactly when f is
    operator monotone on the interval."""
    xs = np.asarray(points, dtype=float)
    if xs.ndim != 1 or xs.size < 1:
        raise ValueError("points must be a nonempty 1-d sequence")
    if np.unique(xs).size != xs.size:
        raise ValueError("points must be distinct")
    lo, hi = domain_of(f)
    out = np.empty((xs.size, xs.size))
    for i, x in enumerate(xs):
        h = 1e-6 * max(1.0, abs(x))
        interior = (x - h > lo) if not is_open_lo(f) else (x - h > lo)
        if not interior or x + h > hi:
            raise DomainError(
                f"point {x!r} too close to the domain boundary", eigenvalue=float(x)
            )
        out[i, i] = (eval_scalar(f, x + h) - eval_scalar(f, x - h)) / (2.0 * h)
        for j in range(i):
            out[i, j] = out[j, i] = (eval_scalar(f, x) - eval_scalar(f, xs[j])) / (
                x - xs[j]
            )
    return out


@dataclass
class SampleReport:
    """Outcome of a randomized monotonicity/convexity battery."""

    kind: str
    fn: str
    n: int
    trials: int
    seed: int
    min_gap: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _sampling_interval(f: FunctionLike) -> tuple[float, float]:
    lo, _ = domain_of(f)
    base = max(lo, -2.0)
    if is_open_lo(f) or base == lo:
        start = base + 0.05 if is_open_lo(f) else base
    else:
        start = base
    return start, start + 3.0


def _random_hermitian_in(rng, n, lo, hi) -> np.ndarray:
    from .sampling import haar_unitary  # deferred: sampling imports linalg only

    w = rng.uniform(lo, hi, size=n)
    U = haar_unitary(n, rng)
    return hermitize((U * w) @ U.conj().T)


def _random_psd_bump(rng, n, scale) -> np.ndarray:
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return scale * (G @ G.conj().T) / n


def sample_monotone(
    f: FunctionLike,
    n: int,
    trials: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SampleReport:
    """Sample pairs A <= B with spectra in the domain of f and test that
    f(B) - f(A) is PSD. Violations are returned with witnesses."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lo, hi = _sampling_interval(f)
    min_gap = np.inf
    violations = []
    for t in range(trials):
        rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, t])
        A = _random_hermitian_in(rng, n, lo, hi)
        B = hermitize(A + _random_psd_bump(rng, n, rng.uniform(0.2, 1.5)))
        FA = eval_on_matrix(f, A, tol)
        FB = eval_on_matrix(f, B, tol)
        diff = hermitize(FB - FA)
        w = np.linalg.eigvalsh(diff)
        scale = max(1.0, spectral_norm(FA), spectral_norm(FB))
        rel = float(w[0]) / scale
        min_gap = min(min_gap, rel)
        if rel < -tol.psd_tol:
            violations.append(
                {
                    "trial": t,
                    "min_eigenvalue": float(w[0]),
                    "A": matio.dumps_matrix(A),
                    "B": matio.dumps_matrix(B),
                }
            )
    return SampleReport(
        kind="monotone",
        fn=function_name(f),
        n=n,
        trials=trials,
        seed=seed,
        min_gap=float(min_gap),
        violations=violations,
    )


def sample_convex(
    f: FunctionLike,
    n: int,
    trials: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SampleReport:
    """Sample (A, B, mix) and test that mix f(A) + (1-mix) f(B) dominates
    f(mix A + (1-mix) B)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lo, hi = _sampling_interval(f)
    min_gap = np.inf
    violations = []
    for t in range(trials):
        rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, t])
        A = _random_hermitian_in(rng, n, lo, hi)
        B = _random_hermitian_in(rng, n, lo, hi)
        mix = float(rng.uniform())
        C = hermitize(mix * A + (1.0 - mix) * B)
        FA = eval_on_matrix(f, A, tol)
        FB = eval_on_matrix(f, B, tol)
        FC = eval_on_matrix(f, C, tol)
        diff = hermitize(mix * FA + (1.0 - mix) * FB - FC)
        w = np.linalg.eigvalsh(diff)
        scale = max(1.0, spectral_norm(FA), spectral_norm(FB))
        rel = float(w[0]) / scale
        min_gap = min(min_gap, rel)
        if rel < -tol.psd_tol:
            violations.append(
                {
                    "trial": t,
                    "min_eigenvalue": float(w[0]),
                    "A": matio.dumps_matrix(A),
                    "B": matio.dumps_matrix(B),
                    "mix": mix,
                }
            )
    return SampleReport(
        kind="convex",
        fn=function_name(f),
        n=n,
        trials=trials,
        seed=seed,
        min_gap=float(min_gap),
        violations=violations,
    )


def compose_log(f: FunctionLike) -> NamedFunction:
    """log(f(t)) for positive-valued f; operator monotone whenever f is."""
    if not flags_of(f)["positive_valued"]:
        raise SpecificationError("log composition needs a positive-valued function")
    lo, hi = domain_of(f)
    return NamedFunction(
        name=f"log({function_name(f)})",
        call=lambda t: np.log(f(t)),
        domain=(max(lo, 0.0), hi),
        open_lo=True,
        operator_monotone=flags_of(f)["operator_monotone"],
    )


def default_catalog() -> list[FunctionLike]:
    """Representative instances used by certification batteries."""
    return [
        power(0.25),
        power(0.5),
        power(0.75),
        power(1.0),
        log_fn(),
        log1p_fn(),
        resolvent_frac(0.5),
        resolvent_frac(2.0),
        inv_perturb(),
        reciprocal(),
        one_plus_inv(),
        linear(0.0, 1.0),
        linear(1.0, 0.5),
        linear(2.0, 0.0),
        square_fn(),
        MonotoneRep(0.1, 0.5, ((1.0, 1.0), (3.0, 0.25))),
        ConvexRep(0.0, 0.0, 1.0, ((2.0, 0.5),)),
    ]


def parse_function(text: str) -> FunctionLike:
    """Parse the CLI function syntax.

    Accepted forms: ``power:0.5``, ``log``, ``log1p``, ``inv_perturb``,
    ``reciprocal``, ``one_plus_inv``, ``square``, ``resolvent:2``,
    ``linear:a:b``, ``rep:[a,b;(l1,w1),(l2,w2)]``,
    ``crep:[a,b,c;(l1,w1)]`` and ``shift:<f>:<eps>``.
    """
    text = text.strip()
    simple = {
        "log": log_fn,
        "log1p": log1p_fn,
        "inv_perturb": inv_perturb,
        "reciprocal": reciprocal,
        "one_plus_inv": one_plus_inv,
        "square": square_fn,
    }
    if text in simple:
        return simple[text]()
    if text.startswith("power:"):
        return power(float(text.split(":", 1)[1]))
    if text.startswith("resolvent:"):
        return resolvent_frac(float(text.split(":", 1)[1]))
    if text.startswith("linear:"):
        _, a, b = text.split(":")
        return linear(float(a), float(b))
    if text.startswith("shift:"):
        inner, eps = text[len("shift:") :].rsplit(":", 1)
        return shift(parse_function(inner), float(eps))
    if text.startswith("rep:[") and text.endswith("]"):
        head, atoms = _split_rep_body(text[len("rep:[") : -1])
        if len(head) != 2:
            raise SpecificationError(f"rep needs two coefficients in {text!r}")
        return MonotoneRep(head[0], head[1], atoms)
    if text.startswith("crep:[") and text.endswith("]"):
        head, atoms = _split_rep_body(text[len("crep:[") : -1])
        if len(head) != 3:
            raise SpecificationError(f"crep needs three coefficients in {text!r}")
        return ConvexRep(head[0], head[1], head[2], atoms)
    raise SpecificationError(f"cannot parse function {text!r}")


def _split_rep_body(body: str) -> tuple[list[float], tuple]:
    if ";" in body:
        head_text, atoms_text = body.split(";", 1)
    else:
        head_text, atoms_text = body, ""
    head = [float(x) for x in head_text.split(",") if x.strip()]
    atoms = []
    rest = atoms_text.strip()
    while rest:
        if not rest.startswith("("):
            raise SpecificationError(f"bad atom list near {rest!r}")
        close = rest.index(")")
        lam, w = rest[1:close].split(",")
        atoms.append((float(lam), float(w)))
        rest = rest[close + 1 :].lstrip(",").strip()
    return head, tuple(atoms)
