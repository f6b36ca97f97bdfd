"""One checkable predicate per determinant / operator inequality.

Every verifier returns an InequalityReport oriented so that gap >= 0
means the inequality holds. Operator inequalities are decided by the
smallest eigenvalue of (RHS - LHS); determinant inequalities compare in
log scale (falling back to the linear scale when a side is exactly 0, so
the gap stays finite); trace inequalities compare scalars.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import RegularityError, SpecificationError
from .fkdet import FKValue, fk_det
from .linalg import (
    COND_CAP,
    DEFAULT_TOL,
    ToleranceConfig,
    check_condition,
    eig_hermitian,
    frobenius,
    hermitian_inverse,
    hermitize,
    is_pd,
    is_psd,
    normalized_trace,
    psd_sqrt,
    require_hermitian,
    require_pd,
    require_square,
    spectral_norm,
)
from .opfuncs import (
    FunctionLike,
    domain_of,
    eval_on_matrix,
    flags_of,
    function_name,
    linear_slope,
)
from .subalgebra import (
    BlockPartition,
    PositiveMapSpec,
    apply_map,
    is_member,
    membership_residual,
    pinch,
)

KIND_DET = "det"
KIND_OPERATOR = "operator"
KIND_SCALAR = "scalar"

# Algebraic self-check identities inside a verifier must hold to this.
IDENTITY_TOL = 1e-10

INEQ_IDS = (
    "hadamard",
    "fischer",
    "arveson_left",
    "arveson_right",
    "square",
    "inverse",
    "resolvent_i",
    "resolvent_ii",
    "op_monotone",
    "op_convex",
    "det_monotone",
    "det_perturb",
    "matic1",
    "matic2",
    "matic_var_counterexample",
    "trace_jensen",
    "logconvex_det",
    "up_hadamard",
    "up_perturb",
    "up_matic",
    "gaussian_entropy",
)


@dataclass(frozen=True)
class InequalityReport:
    """Per-trial outcome of one inequality check.

    gap >= 0 means the inequality holds; equality_expected carries the
    verdict of the theorem's equality characterization on these inputs
    (None when no characterization applies).
    """

    ineq_id: str
    lhs: float
    rhs: float
    gap: float
    holds: bool
    equality_detected: bool
    equality_expected: bool | None
    scale: float
    kind: str
    log_lhs: float | None = None
    log_rhs: float | None = None
    trial: int = 0
    seed: int = 0
    witness: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "ineq_id": self.ineq_id,
            "trial": int(self.trial),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "gap": float(self.gap),
            "holds": bool(self.holds),
            "equality_detected": bool(self.equality_detected),
            "equality_expected": (
                None if self.equality_expected is None else bool(self.equality_expected)
            ),
            "seed": int(self.seed),
            "kind": self.kind,
            "scale": float(self.scale),
            "log_lhs": None if self.log_lhs is None else float(self.log_lhs),
            "log_rhs": None if self.log_rhs is None else float(self.log_rhs),
            "witness": self.witness,
            "notes": self.notes,
        }


def _finish(
    ineq_id: str,
    kind: str,
    lhs: float,
    rhs: float,
    gap: float,
    scale: float,
    equality_expected: bool | None,
    tol: ToleranceConfig,
    log_lhs: float | None = None,
    log_rhs: float | None = None,
    notes: dict | None = None,
) -> InequalityReport:
    notes = dict(notes or {})
    holds = gap >= -tol.violation_tol * scale
    equality_detected = abs(gap) <= tol.equality_tol * scale
    notes.setdefault("equality_tol", tol.equality_tol)
    notes.setdefault("violation_tol", tol.violation_tol)
    return InequalityReport(
        ineq_id=ineq_id,
        lhs=float(lhs),
        rhs=float(rhs),
        gap=float(gap),
        holds=holds,
        equality_detected=equality_detected,
        equality_expected=equality_expected,
        scale=float(scale),
        kind=kind,
        log_lhs=log_lhs,
        log_rhs=log_rhs,
        notes=notes,
    )


def _det_report(
    ineq_id: str,
    fk_lhs: FKValue,
    fk_rhs: FKValue,
    equality_expected: bool | None,
    tol: ToleranceConfig,
    notes: dict | None = None,
) -> InequalityReport:
    notes = dict(notes or {})
    if fk_lhs.is_zero or fk_rhs.is_zero:
        gap = fk_rhs.value - fk_lhs.value
        scale = max(1.0, fk_lhs.value, fk_rhs.value)
        notes["gap_scale"] = "linear"
        log_lhs = None if fk_lhs.is_zero else fk_lhs.log_value
        log_rhs = None if fk_rhs.is_zero else fk_rhs.log_value
    else:
        gap = fk_rhs.log_value - fk_lhs.log_value
        scale = max(1.0, abs(fk_lhs.log_value), abs(fk_rhs.log_value))
        notes["gap_scale"] = "log"
        log_lhs, log_rhs = fk_lhs.log_value, fk_rhs.log_value
    return _finish(
        ineq_id,
        KIND_DET,
        fk_lhs.value,
        fk_rhs.value,
        gap,
        scale,
        equality_expected,
        tol,
        log_lhs=log_lhs,
        log_rhs=log_rhs,
        notes=notes,
    )


def _det_ratio_report(
    ineq_id: str,
    lhs_log: float,
    rhs_log: float,
    equality_expected: bool | None,
    tol: ToleranceConfig,
    notes: dict | None = None,
) -> InequalityReport:
    notes = dict(notes or {})
    notes["gap_scale"] = "log"
    gap = rhs_log - lhs_log
    scale = max(1.0, abs(lhs_log), abs(rhs_log))
    return _finish(
        ineq_id,
        KIND_DET,
        math.exp(lhs_log),
        math.exp(rhs_log),
        gap,
        scale,
        equality_expected,
        tol,
        log_lhs=lhs_log,
        log_rhs=rhs_log,
        notes=notes,
    )


def _operator_report(
    ineq_id: str,
    lhs_mat: np.ndarray,
    rhs_mat: np.ndarray,
    equality_expected: bool | None,
    tol: ToleranceConfig,
    notes: dict | None = None,
) -> InequalityReport:
    diff = hermitize(rhs_mat - lhs_mat)
    gap = float(np.linalg.eigvalsh(diff)[0])
    scale = max(1.0, spectral_norm(lhs_mat), spectral_norm(rhs_mat))
    return _finish(
        ineq_id,
        KIND_OPERATOR,
        frobenius(lhs_mat),
        frobenius(rhs_mat),
        gap,
        scale,
        equality_expected,
        tol,
        notes=notes,
    )


def _scalar_report(
    ineq_id: str,
    lhs: float,
    rhs: float,
    equality_expected: bool | None,
    tol: ToleranceConfig,
    notes: dict | None = None,
) -> InequalityReport:
    gap = rhs - lhs
    scale = max(1.0, abs(lhs), abs(rhs))
    return _finish(
        ineq_id, KIND_SCALAR, lhs, rhs, gap, scale, equality_expected, tol, notes=notes
    )


def _member_expected(A, part: BlockPartition, tol: ToleranceConfig) -> bool:
    return is_member(A, part, tol)


def v_hadamard(A, tol: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """det A <= product of diagonal entries, equality iff A is diagonal."""
    M = require_pd(A, tol)
    part = BlockPartition.diagonal(M.shape[0])
    notes = {"cond_A": check_condition(M, "A"), "membership_residual": membership_residual(M, part)}
    return _det_report(
        "hadamard",
        fk_det(M, tol),
        fk_det(pinch(M, part), tol),
        _member_expected(M, part, tol),
        tol,
        notes,
    )


def v_fischer(A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """det A <= product of principal block determinants."""
    M = require_pd(A, tol)
    notes = {"cond_A": check_condition(M, "A"), "membership_residual": membership_residual(M, part)}
    return _det_report(
        "fischer",
        fk_det(M, tol),
        fk_det(pinch(M, part), tol),
        _member_expected(M, part, tol),
        tol,
        notes,
    )


def v_arveson(
    A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[InequalityReport | None, InequalityReport]:
    """Pinching squeeze: det(pinch(inv A))^-1 <= det A <= det(pinch A).

    The left bound needs A positive-definite and is omitted (None) for
    singular PSD input; the right bound holds for all PSD A.
    """
    M = require_hermitian(A, tol)
    if not is_psd(M, tol):
        raise RegularityError("input must be positive-semidefinite")
    pd = is_pd(M, tol)
    expected = _member_expected(M, part, tol) if pd else None
    notes = {"membership_residual": membership_residual(M, part)}
    right = _det_report(
        "arveson_right", fk_det(M, tol), fk_det(pinch(M, part), tol), expected, tol, notes
    )
    left = None
    if pd:
        notes_l = dict(notes)
        notes_l["cond_A"] = check_condition(M, "A")
        inv_pinched = fk_det(pinch(hermitian_inverse(M, tol), part), tol)
        lhs = FKValue(1.0 / inv_pinched.value, -inv_pinched.log_value)
        left = _det_report("arveson_left", lhs, fk_det(M, tol), expected, tol, notes_l)
    return left, right


def v_square(A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """pinch(A)^2 <= pinch(A^2) for Hermitian A."""
    M = require_hermitian(A, tol)
    PA = pinch(M, part)
    return _operator_report(
        "square",
        PA @ PA,
        pinch(M @ M, part),
        _member_expected(M, part, tol),
        tol,
        {"membership_residual": membership_residual(M, part)},
    )


def v_inverse(A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """pinch(A)^-1 <= pinch(A^-1) for positive-definite A."""
    M = require_pd(A, tol)
    notes = {"cond_A": check_condition(M, "A"), "membership_residual": membership_residual(M, part)}
    PA = require_pd(pinch(M, part), tol)
    return _operator_report(
        "inverse",
        hermitian_inverse(PA, tol),
        pinch(hermitian_inverse(M, tol), part),
        _member_expected(M, part, tol),
        tol,
        notes,
    )


def v_resolvent(
    A, part: BlockPartition, lam: float, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[InequalityReport, InequalityReport]:
    """Resolvent bounds at lam > 0 for PSD A:

    (i)  pinch(A (lam+A)^-1)              <= PA (lam+PA)^-1
    (ii) PA^2 (lam+PA)^-1                 <= pinch(A^2 (lam+A)^-1)

    Both proofs rest on the identities X(lam+X)^-1 = I - lam (lam+X)^-1
    and X^2 (lam+X)^-1 = X - lam + lam^2 (lam+X)^-1, which are re-checked
    here as a numerical self-test.
    """
    if lam <= 0:
        raise ValueError("resolvent parameter must be positive")
    M = require_hermitian(A, tol)
    if not is_psd(M, tol):
        raise RegularityError("input must be positive-semidefinite")
    n = M.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    R = np.linalg.inv(lam * eye + M)
    AR = hermitize(M @ R)
    A2R = hermitize(M @ M @ R)
    id1 = frobenius(AR - (eye - lam * R)) / max(1.0, frobenius(AR))
    id2 = frobenius(A2R - (M - lam * eye + lam * lam * R)) / max(1.0, frobenius(A2R))
    if max(id1, id2) > IDENTITY_TOL:
        raise SpecificationError(
            f"resolvent identities failed: residuals {id1:.2e}, {id2:.2e}"
        )
    PA = pinch(M, part)
    RP = np.linalg.inv(lam * eye + PA)
    expected = _member_expected(M, part, tol)
    notes = {
        "lam": float(lam),
        "identity_residuals": [float(id1), float(id2)],
        "membership_residual": membership_residual(M, part),
    }
    rep_i = _operator_report(
        "resolvent_i", pinch(AR, part), hermitize(PA @ RP), expected, tol, notes
    )
    rep_ii = _operator_report(
        "resolvent_ii", hermitize(PA @ PA @ RP), pinch(A2R, part), expected, tol, notes
    )
    return rep_i, rep_ii


def v_op_monotone(
    f: FunctionLike, A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """pinch(f(A)) <= f(pinch(A)) for operator monotone f; equality iff A
    is in the subalgebra or f is linear with positive slope."""
    if not flags_of(f)["operator_monotone"]:
        raise SpecificationError(f"{function_name(f)} is not flagged operator monotone")
    M = require_pd(A, tol)
    slope = linear_slope(f)
    expected = bool(
        _member_expected(M, part, tol) or (slope is not None and slope > 0)
    )
    return _operator_report(
        "op_monotone",
        pinch(eval_on_matrix(f, M, tol), part),
        eval_on_matrix(f, pinch(M, part), tol),
        expected,
        tol,
        {"fn": function_name(f), "membership_residual": membership_residual(M, part)},
    )


def v_op_convex(
    f: FunctionLike, A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """f(pinch(A)) <= pinch(f(A)) for operator convex f; note the reversal
    relative to the monotone bound. Equality iff membership or f linear."""
    if not flags_of(f)["operator_convex"]:
        raise SpecificationError(f"{function_name(f)} is not flagged operator convex")
    M = require_pd(A, tol)
    expected = bool(_member_expected(M, part, tol) or linear_slope(f) is not None)
    return _operator_report(
        "op_convex",
        eval_on_matrix(f, pinch(M, part), tol),
        pinch(eval_on_matrix(f, M, tol), part),
        expected,
        tol,
        {"fn": function_name(f), "membership_residual": membership_residual(M, part)},
    )


def v_det_monotone(
    f: FunctionLike, A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """det f(A) <= det f(pinch(A)) for positive-valued non-constant
    operator monotone f; equality iff membership (no linear escape)."""
    flags = flags_of(f)
    if not flags["operator_monotone"] or not flags["positive_valued"]:
        raise SpecificationError(
            f"{function_name(f)} must be positive-valued operator monotone"
        )
    if linear_slope(f) == 0.0:
        raise SpecificationError("constant functions are excluded")
    M = require_pd(A, tol)
    return _det_report(
        "det_monotone",
        fk_det(eval_on_matrix(f, M, tol), tol),
        fk_det(eval_on_matrix(f, pinch(M, part), tol), tol),
        _member_expected(M, part, tol),
        tol,
        {"fn": function_name(f), "membership_residual": membership_residual(M, part)},
    )


def v_det_perturb(A, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL) -> InequalityReport:
    """det(I + pinch(A)^-1) <= det(I + A^-1), equality iff membership."""
    M = require_pd(A, tol)
    notes = {"cond_A": check_condition(M, "A"), "membership_residual": membership_residual(M, part)}
    n = M.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    PA = require_pd(pinch(M, part), tol)
    return _det_report(
        "det_perturb",
        fk_det(eye + hermitian_inverse(PA, tol), tol),
        fk_det(eye + hermitian_inverse(M, tol), tol),
        _member_expected(M, part, tol),
        tol,
        notes,
    )


def _require_psd_member(B, part: BlockPartition, tol: ToleranceConfig) -> np.ndarray:
    MB = require_hermitian(B, tol)
    if not is_psd(MB, tol):
        raise RegularityError("perturbation must be positive-semidefinite")
    if not is_member(MB, part, tol):
        raise SpecificationError("perturbation must lie in the subalgebra")
    return MB


def v_matic1(
    A, B, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """det(pinch(A)+B)/det(pinch(A)) <= det(A+B)/det(A) for PD A and PSD B
    in the subalgebra. For regular B, equality iff A is a member; for
    B = 0 equality always; for singular nonzero B no expectation is set.
    """
    M = require_pd(A, tol)
    MB = _require_psd_member(B, part, tol)
    PA = pinch(M, part)
    lhs_log = fk_det(PA + MB, tol).log_value - fk_det(PA, tol).log_value
    rhs_log = fk_det(M + MB, tol).log_value - fk_det(M, tol).log_value
    b_zero = frobenius(MB) <= tol.membership_tol * max(1.0, frobenius(M))
    if b_zero:
        expected: bool | None = True
    elif is_pd(MB, tol):
        expected = _member_expected(M, part, tol)
    else:
        expected = None
    notes = {
        "cond_A": check_condition(M, "A"),
        "b_regular": bool(is_pd(MB, tol)),
        "membership_residual": membership_residual(M, part),
    }
    return _det_ratio_report("matic1", lhs_log, rhs_log, expected, tol, notes)


def v_matic2(
    A, B, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """det(A+B)/det(A) <= det(pinch(A^-1)^-1 + B)/det(pinch(A^-1)^-1);
    equality iff B^(1/2) A^-1 B^(1/2) lies in the subalgebra."""
    M = require_pd(A, tol)
    MB = _require_psd_member(B, part, tol)
    notes = {"cond_A": check_condition(M, "A")}
    Minv = hermitian_inverse(M, tol)
    harmonic = hermitian_inverse(require_pd(pinch(Minv, part), tol), tol)
    lhs_log = fk_det(M + MB, tol).log_value - fk_det(M, tol).log_value
    rhs_log = fk_det(harmonic + MB, tol).log_value - fk_det(harmonic, tol).log_value
    Bh = psd_sqrt(MB, tol)
    X = hermitize(Bh @ Minv @ Bh)
    notes["equality_witness_residual"] = membership_residual(X, part)
    expected = is_member(X, part, tol)
    return _det_ratio_report("matic2", lhs_log, rhs_log, expected, tol, notes)


def v_counterexample_matic_var(
    B, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """The matic1 bound with the subalgebra constraint on B dropped fails:
    at A = I and B outside the subalgebra the gap goes strictly negative
    (det(I + pinch(B)) > det(I + B))."""
    MB = require_hermitian(B, tol)
    if not is_psd(MB, tol):
        raise RegularityError("perturbation must be positive-semidefinite")
    if is_member(MB, part, tol):
        raise SpecificationError("counterexample needs B outside the subalgebra")
    n = MB.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    lhs_log = fk_det(eye + pinch(MB, part), tol).log_value
    rhs_log = fk_det(eye + MB, tol).log_value
    notes = {"membership_residual": membership_residual(MB, part)}
    return _det_ratio_report(
        "matic_var_counterexample", lhs_log, rhs_log, None, tol, notes
    )


def v_trace_jensen(
    f: FunctionLike, A, mapspec: PositiveMapSpec, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """tr f(map(A)) <= tr map(f(A)) for scalar-convex f and a unital
    positive trace-preserving map.

    Sub-checks recorded in the notes: map(A) keeps its spectrum inside the
    spectral hull of A, and the compression of map(f(A)) to the eigenbasis
    of map(A) dominates f(map(A)) (the abelian-range Jensen bound).
    """
    if not flags_of(f)["scalar_convex"]:
        raise SpecificationError(f"{function_name(f)} is not flagged convex")
    M = require_hermitian(A, tol)
    wA = np.linalg.eigvalsh(M)
    lo_dom, hi_dom = domain_of(f)
    PA = hermitize(apply_map(M, mapspec))
    wP, U = eig_hermitian(PA, tol)
    slack = tol.psd_tol * max(1.0, float(np.max(np.abs(wA))))
    containment = float(max(wP[0] - wA[0], wA[-1] - wP[-1], 0.0))
    if wP[0] < wA[0] - slack or wP[-1] > wA[-1] + slack:
        raise SpecificationError(
            f"map output spectrum escapes the input hull by {containment:.3e}"
        )
    fA = eval_on_matrix(f, M, tol)
    fPA = eval_on_matrix(f, PA, tol)
    mapped_fA = hermitize(apply_map(fA, mapspec))
    # Abelian-range route: diagonalize map(A), pinch map(f(A)) to that basis.
    compressed = U @ np.diag(np.diagonal(U.conj().T @ mapped_fA @ U)) @ U.conj().T
    masa_gap = float(np.linalg.eigvalsh(hermitize(compressed - fPA))[0])
    lhs = normalized_trace(fPA).real
    rhs = normalized_trace(mapped_fA).real
    expected = True if linear_slope(f) is not None else None
    notes = {
        "fn": function_name(f),
        "map": mapspec.describe(),
        "spectrum_escape": containment,
        "abelian_route_min_eig": masa_gap,
    }
    return _scalar_report("trace_jensen", lhs, rhs, expected, tol, notes)


def v_logconvex_det(
    f: FunctionLike, A, mapspec: PositiveMapSpec, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """det f(map(A)) <= det f(A) for positive log-convex f and a unital
    positive trace-preserving map."""
    flags = flags_of(f)
    if not flags["log_convex"] or not flags["positive_valued"]:
        raise SpecificationError(
            f"{function_name(f)} must be positive-valued and log-convex"
        )
    M = require_hermitian(A, tol)
    if not is_psd(M, tol):
        raise RegularityError("input must be positive-semidefinite")
    PA = hermitize(apply_map(M, mapspec))
    expected = True if linear_slope(f) == 0.0 else None
    notes = {"fn": function_name(f), "map": mapspec.describe()}
    return _det_report(
        "logconvex_det",
        fk_det(eval_on_matrix(f, PA, tol), tol),
        fk_det(eval_on_matrix(f, M, tol), tol),
        expected,
        tol,
        notes,
    )


def v_unit_positive_hadamard(
    A, mapspec: PositiveMapSpec, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[InequalityReport | None, InequalityReport]:
    """det squeeze for a general trace-preserving unital positive map:
    det(map(A^-1))^-1 <= det A <= det(map(A)). No equality diagnosis."""
    M = require_hermitian(A, tol)
    if not is_psd(M, tol):
        raise RegularityError("input must be positive-semidefinite")
    notes = {"map": mapspec.describe()}
    right = _det_report(
        "up_hadamard",
        fk_det(M, tol),
        fk_det(hermitize(apply_map(M, mapspec)), tol),
        None,
        tol,
        {**notes, "side": "right"},
    )
    left = None
    if is_pd(M, tol):
        notes_l = {**notes, "side": "left", "cond_A": check_condition(M, "A")}
        mapped_inv = fk_det(hermitize(apply_map(hermitian_inverse(M, tol), mapspec)), tol)
        lhs = FKValue(1.0 / mapped_inv.value, -mapped_inv.log_value)
        left = _det_report("up_hadamard", lhs, fk_det(M, tol), None, tol, notes_l)
    return left, right


def v_unit_positive_perturb(
    A, mapspec: PositiveMapSpec, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """det(I + map(A)^-1) <= det(I + A^-1) for PD A."""
    M = require_pd(A, tol)
    notes = {"map": mapspec.describe(), "cond_A": check_condition(M, "A")}
    n = M.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    PA = require_pd(hermitize(apply_map(M, mapspec)), tol)
    return _det_report(
        "up_perturb",
        fk_det(eye + hermitian_inverse(PA, tol), tol),
        fk_det(eye + hermitian_inverse(M, tol), tol),
        None,
        tol,
        notes,
    )


def v_unit_positive_matic(
    A, B, mapspec: PositiveMapSpec, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """det(A+B)/det(A) <= det(map(A)+map(B))/det(map(A^-1))^-1 for PD A and
    arbitrary PSD B."""
    M = require_pd(A, tol)
    MB = require_hermitian(B, tol)
    if not is_psd(MB, tol):
        raise RegularityError("perturbation must be positive-semidefinite")
    notes = {"map": mapspec.describe(), "cond_A": check_condition(M, "A")}
    lhs_log = fk_det(M + MB, tol).log_value - fk_det(M, tol).log_value
    mapped_sum = hermitize(apply_map(M, mapspec) + apply_map(MB, mapspec))
    mapped_inv = fk_det(hermitize(apply_map(hermitian_inverse(M, tol), mapspec)), tol)
    rhs_log = fk_det(mapped_sum, tol).log_value + mapped_inv.log_value
    return _det_ratio_report("up_matic", lhs_log, rhs_log, None, tol, notes)


def v_gaussian_entropy(
    Sigma, part: BlockPartition, tol: ToleranceConfig = DEFAULT_TOL
) -> InequalityReport:
    """Subadditivity of Gaussian differential entropy across a partition
    of coordinates: h(whole) <= sum of block entropies, with h computed
    from 0.5 * ln((2 pi e)^n det Sigma). Equality iff the blocks are
    uncorrelated."""
    M = require_pd(Sigma, tol)
    n = M.shape[0]
    const = math.log(2.0 * math.pi * math.e)
    log_det = n * fk_det(M, tol).log_value
    log_det_blocks = n * fk_det(pinch(M, part), tol).log_value
    lhs = 0.5 * (n * const + log_det)
    rhs = 0.5 * (n * const + log_det_blocks)
    notes = {
        "cond_A": check_condition(M, "Sigma"),
        "membership_residual": membership_residual(M, part),
    }
    return _scalar_report(
        "gaussian_entropy", lhs, rhs, _member_expected(M, part, tol), tol, notes
    )
