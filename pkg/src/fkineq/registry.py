"""Registry wiring each inequality id to its instance sampler, verifier
adapter, falsification perturbation, and equality-clause constructors,
plus the seeded trial runner used by the CLI and the test suites.
"""
from __future__ import annotations

import concurrent.futures
import os
from dataclasses import dataclass, replace

import numpy as np

from . import matio, verifiers
from .errors import IllConditionedError, NumericalFailureError, SpecificationError
from .linalg import COND_RESAMPLE, DEFAULT_TOL, ToleranceConfig, frobenius, hermitize, psd_part
from .opfuncs import FunctionLike, parse_function
from .sampling import (
    SamplerConfig,
    hermitian_gaussian,
    random_hermitian,
    random_member,
    random_mixing_pairs,
    random_nonmember,
    random_pd,
    random_psd_singular,
    trial_rng,
)
from .subalgebra import BlockPartition, PositiveMapSpec, is_member, pinch
from .verifiers import INEQ_IDS, InequalityReport

MAX_RESAMPLE = 32
NONMEMBER_DISTANCE = 0.1


@dataclass(frozen=True)
class InequalityEntry:
    ineq_id: str
    guaranteed: bool
    has_iff: bool
    needs_fn: bool = False
    needs_b: bool = False
    needs_map: bool = False
    default_fn: str | None = None
    default_map: str = "pinch"  # or "mixing"

    def resolve_fn(self, fn_text: str | None) -> FunctionLike | None:
        if not self.needs_fn:
            return None
        return parse_function(fn_text or self.default_fn)

    def default_mapspec(self, cfg: SamplerConfig, rng) -> PositiveMapSpec | None:
        if not self.needs_map:
            return None
        if self.default_map == "mixing":
            return PositiveMapSpec.unitary_mixing(random_mixing_pairs(cfg.n, 3, rng))
        return PositiveMapSpec.pinching(cfg.partition)

    # --- instance construction -------------------------------------------

    def sample(self, cfg: SamplerConfig, rng, fn=None, mapspec=None) -> dict:
        ins = _SAMPLERS[self.ineq_id](cfg, rng)
        return self._attach(ins, cfg, rng, fn, mapspec)

    def make_member(self, cfg: SamplerConfig, rng, fn=None, mapspec=None) -> dict:
        maker = _MEMBER_MAKERS.get(self.ineq_id)
        if maker is None:
            raise SpecificationError(f"{self.ineq_id} has no equality clause")
        return self._attach(maker(cfg, rng), cfg, rng, fn, mapspec)

    def make_nonmember(self, cfg: SamplerConfig, rng, fn=None, mapspec=None) -> dict:
        maker = _NONMEMBER_MAKERS.get(self.ineq_id)
        if maker is None:
            raise SpecificationError(f"{self.ineq_id} has no equality clause")
        return self._attach(maker(cfg, rng), cfg, rng, fn, mapspec)

    def _attach(self, ins: dict, cfg, rng, fn, mapspec) -> dict:
        ins["part"] = cfg.partition
        if self.needs_fn:
            ins["fn"] = fn if fn is not None else self.resolve_fn(None)
        if self.needs_map:
            ins["map"] = mapspec if mapspec is not None else self.default_mapspec(cfg, rng)
        return ins

    def perturb(self, ins: dict, scale: float, rng, cfg: SamplerConfig) -> dict:
        return _PERTURBERS[self.ineq_id](ins, scale, rng, cfg)


# --- samplers --------------------------------------------------------------


def _s_pd(cfg, rng):
    return {"A": random_pd(cfg, rng)}


def _s_pd_or_singular(cfg, rng):
    if cfg.rank is not None and cfg.rank < cfg.n:
        return {"A": random_psd_singular(cfg, rng)}
    return {"A": random_pd(cfg, rng)}


def _s_hermitian(cfg, rng):
    return {"A": random_hermitian(cfg, rng)}


def _s_resolvent(cfg, rng):
    return {"A": random_pd(cfg, rng), "lam": float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))}


def _s_pd_with_member_b(cfg, rng):
    return {"A": random_pd(cfg, rng), "B": random_member(cfg, rng, pd=True)}


def _s_nonmember_b(cfg, rng):
    return {"B": random_nonmember(cfg, rng, NONMEMBER_DISTANCE, pd=True)}


def _s_pd_with_psd_b(cfg, rng):
    return {"A": random_pd(cfg, rng), "B": random_pd(cfg, rng)}


_SAMPLERS = {
    "hadamard": _s_pd,
    "fischer": _s_pd,
    "arveson_left": _s_pd,
    "arveson_right": _s_pd_or_singular,
    "square": _s_hermitian,
    "inverse": _s_pd,
    "resolvent_i": _s_resolvent,
    "resolvent_ii": _s_resolvent,
    "op_monotone": _s_pd,
    "op_convex": _s_pd,
    "det_monotone": _s_pd,
    "det_perturb": _s_pd,
    "matic1": _s_pd_with_member_b,
    "matic2": _s_pd_with_member_b,
    "matic_var_counterexample": _s_nonmember_b,
    "trace_jensen": _s_hermitian,
    "logconvex_det": _s_pd,
    "up_hadamard": _s_pd,
    "up_perturb": _s_pd,
    "up_matic": _s_pd_with_psd_b,
    "gaussian_entropy": _s_pd,
}


# --- equality-clause constructors ------------------------------------------


def _m_member(cfg, rng):
    return {"A": random_member(cfg, rng, pd=True)}


def _m_member_hermitian(cfg, rng):
    return {"A": random_member(cfg, rng, pd=False)}


def _m_member_resolvent(cfg, rng):
    return {"A": random_member(cfg, rng, pd=True), "lam": 1.0}


def _m_member_with_b(cfg, rng):
    return {"A": random_member(cfg, rng, pd=True), "B": random_member(cfg, rng, pd=True)}


def _u_nonmember(cfg, rng):
    return {"A": random_nonmember(cfg, rng, NONMEMBER_DISTANCE, pd=True)}


def _u_nonmember_hermitian(cfg, rng):
    A = random_nonmember(cfg, rng, NONMEMBER_DISTANCE, pd=True)
    return {"A": A}


def _u_nonmember_resolvent(cfg, rng):
    return {"A": random_nonmember(cfg, rng, NONMEMBER_DISTANCE, pd=True), "lam": 1.0}


def _u_nonmember_with_b(cfg, rng):
    return {
        "A": random_nonmember(cfg, rng, NONMEMBER_DISTANCE, pd=True),
        "B": random_member(cfg, rng, pd=True),
    }


_MEMBER_MAKERS = {
    "hadamard": _m_member,
    "fischer": _m_member,
    "arveson_left": _m_member,
    "arveson_right": _m_member,
    "square": _m_member_hermitian,
    "inverse": _m_member,
    "resolvent_i": _m_member_resolvent,
    "resolvent_ii": _m_member_resolvent,
    "op_monotone": _m_member,
    "op_convex": _m_member,
    "det_monotone": _m_member,
    "det_perturb": _m_member,
    "matic1": _m_member_with_b,
    "matic2": _m_member_with_b,
    "gaussian_entropy": _m_member,
}

_NONMEMBER_MAKERS = {
    "hadamard": _u_nonmember,
    "fischer": _u_nonmember,
    "arveson_left": _u_nonmember,
    "arveson_right": _u_nonmember,
    "square": _u_nonmember_hermitian,
    "inverse": _u_nonmember,
    "resolvent_i": _u_nonmember_resolvent,
    "resolvent_ii": _u_nonmember_resolvent,
    "op_monotone": _u_nonmember,
    "op_convex": _u_nonmember,
    "det_monotone": _u_nonmember,
    "det_perturb": _u_nonmember,
    "matic1": _u_nonmember_with_b,
    "matic2": _u_nonmember_with_b,
    "gaussian_entropy": _u_nonmember,
}


# --- falsification perturbations -------------------------------------------


def _clamp_pd(A, floor: float) -> np.ndarray:
    from .linalg import apply_fn

    return apply_fn(A, lambda w: np.maximum(w, floor))


def _perturb_a_pd(ins, scale, rng, cfg):
    out = dict(ins)
    A = ins["A"]
    step = scale * max(1.0, frobenius(A)) / A.shape[0]
    out["A"] = _clamp_pd(
        hermitize(A + step * hermitian_gaussian(A.shape[0], rng)),
        cfg.spectrum_range[0] * 1e-2,
    )
    return out


def _perturb_a_hermitian(ins, scale, rng, cfg):
    out = dict(ins)
    A = ins["A"]
    step = scale * max(1.0, frobenius(A)) / A.shape[0]
    out["A"] = hermitize(A + step * hermitian_gaussian(A.shape[0], rng))
    return out


def _perturb_a_pd_b_member(ins, scale, rng, cfg):
    out = _perturb_a_pd(ins, scale, rng, cfg)
    B = ins["B"]
    step = scale * max(1.0, frobenius(B)) / B.shape[0]
    cand = psd_part(hermitize(B + step * pinch(hermitian_gaussian(B.shape[0], rng), cfg.partition)))
    out["B"] = pinch(cand, cfg.partition)
    return out


def _perturb_b_nonmember(ins, scale, rng, cfg):
    out = dict(ins)
    B = ins["B"]
    step = scale * max(1.0, frobenius(B)) / B.shape[0]
    cand = psd_part(hermitize(B + step * hermitian_gaussian(B.shape[0], rng)))
    if not is_member(cand, cfg.partition):
        out["B"] = cand
    return out


def _perturb_a_pd_b_psd(ins, scale, rng, cfg):
    out = _perturb_a_pd(ins, scale, rng, cfg)
    B = ins["B"]
    step = scale * max(1.0, frobenius(B)) / B.shape[0]
    out["B"] = psd_part(hermitize(B + step * hermitian_gaussian(B.shape[0], rng)))
    return out


_PERTURBERS = {
    "hadamard": _perturb_a_pd,
    "fischer": _perturb_a_pd,
    "arveson_left": _perturb_a_pd,
    "arveson_right": _perturb_a_pd,
    "square": _perturb_a_hermitian,
    "inverse": _perturb_a_pd,
    "resolvent_i": _perturb_a_pd,
    "resolvent_ii": _perturb_a_pd,
    "op_monotone": _perturb_a_pd,
    "op_convex": _perturb_a_pd,
    "det_monotone": _perturb_a_pd,
    "det_perturb": _perturb_a_pd,
    "matic1": _perturb_a_pd_b_member,
    "matic2": _perturb_a_pd_b_member,
    "matic_var_counterexample": _perturb_b_nonmember,
    "trace_jensen": _perturb_a_hermitian,
    "logconvex_det": _perturb_a_pd,
    "up_hadamard": _perturb_a_pd,
    "up_perturb": _perturb_a_pd,
    "up_matic": _perturb_a_pd_b_psd,
    "gaussian_entropy": _perturb_a_pd,
}


# --- verifier adapters ------------------------------------------------------


def evaluate_inputs(
    entry: InequalityEntry, ins: dict, tol: ToleranceConfig
) -> list[InequalityReport]:
    iid = entry.ineq_id
    part = ins.get("part")
    if iid == "hadamard":
        return [verifiers.v_hadamard(ins["A"], tol)]
    if iid == "fischer":
        return [verifiers.v_fischer(ins["A"], part, tol)]
    if iid == "arveson_left":
        left, _right = verifiers.v_arveson(ins["A"], part, tol)
        if left is None:
            raise SpecificationError("left bound needs a positive-definite input")
        return [left]
    if iid == "arveson_right":
        _left, right = verifiers.v_arveson(ins["A"], part, tol)
        return [right]
    if iid == "square":
        return [verifiers.v_square(ins["A"], part, tol)]
    if iid == "inverse":
        return [verifiers.v_inverse(ins["A"], part, tol)]
    if iid == "resolvent_i":
        return [verifiers.v_resolvent(ins["A"], part, ins.get("lam", 1.0), tol)[0]]
    if iid == "resolvent_ii":
        return [verifiers.v_resolvent(ins["A"], part, ins.get("lam", 1.0), tol)[1]]
    if iid == "op_monotone":
        return [verifiers.v_op_monotone(ins["fn"], ins["A"], part, tol)]
    if iid == "op_convex":
        return [verifiers.v_op_convex(ins["fn"], ins["A"], part, tol)]
    if iid == "det_monotone":
        return [verifiers.v_det_monotone(ins["fn"], ins["A"], part, tol)]
    if iid == "det_perturb":
        return [verifiers.v_det_perturb(ins["A"], part, tol)]
    if iid == "matic1":
        return [verifiers.v_matic1(ins["A"], ins["B"], part, tol)]
    if iid == "matic2":
        return [verifiers.v_matic2(ins["A"], ins["B"], part, tol)]
    if iid == "matic_var_counterexample":
        return [verifiers.v_counterexample_matic_var(ins["B"], part, tol)]
    if iid == "trace_jensen":
        return [verifiers.v_trace_jensen(ins["fn"], ins["A"], ins["map"], tol)]
    if iid == "logconvex_det":
        return [verifiers.v_logconvex_det(ins["fn"], ins["A"], ins["map"], tol)]
    if iid == "up_hadamard":
        left, right = verifiers.v_unit_positive_hadamard(ins["A"], ins["map"], tol)
        return [right] if left is None else [right, left]
    if iid == "up_perturb":
        return [verifiers.v_unit_positive_perturb(ins["A"], ins["map"], tol)]
    if iid == "up_matic":
        return [verifiers.v_unit_positive_matic(ins["A"], ins["B"], ins["map"], tol)]
    if iid == "gaussian_entropy":
        return [verifiers.v_gaussian_entropy(ins["A"], part, tol)]
    raise KeyError(iid)


REGISTRY: dict[str, InequalityEntry] = {
    e.ineq_id: e
    for e in (
        InequalityEntry("hadamard", guaranteed=True, has_iff=True),
        InequalityEntry("fischer", guaranteed=True, has_iff=True),
        InequalityEntry("arveson_left", guaranteed=True, has_iff=True),
        InequalityEntry("arveson_right", guaranteed=True, has_iff=True),
        InequalityEntry("square", guaranteed=True, has_iff=True),
        InequalityEntry("inverse", guaranteed=True, has_iff=True),
        InequalityEntry("resolvent_i", guaranteed=True, has_iff=True),
        InequalityEntry("resolvent_ii", guaranteed=True, has_iff=True),
        InequalityEntry(
            "op_monotone", guaranteed=True, has_iff=True, needs_fn=True, default_fn="power:0.5"
        ),
        InequalityEntry(
            "op_convex", guaranteed=True, has_iff=True, needs_fn=True, default_fn="square"
        ),
        InequalityEntry(
            "det_monotone", guaranteed=True, has_iff=True, needs_fn=True, default_fn="inv_perturb"
        ),
        InequalityEntry("det_perturb", guaranteed=True, has_iff=True),
        InequalityEntry("matic1", guaranteed=True, has_iff=True, needs_b=True),
        InequalityEntry("matic2", guaranteed=True, has_iff=True, needs_b=True),
        InequalityEntry(
            "matic_var_counterexample", guaranteed=False, has_iff=False, needs_b=True
        ),
        InequalityEntry(
            "trace_jensen",
            guaranteed=True,
            has_iff=False,
            needs_fn=True,
            needs_map=True,
            default_fn="square",
        ),
        InequalityEntry(
            "logconvex_det",
            guaranteed=True,
            has_iff=False,
            needs_fn=True,
            needs_map=True,
            default_fn="one_plus_inv",
        ),
        InequalityEntry(
            "up_hadamard", guaranteed=True, has_iff=False, needs_map=True, default_map="mixing"
        ),
        InequalityEntry(
            "up_perturb", guaranteed=True, has_iff=False, needs_map=True, default_map="mixing"
        ),
        InequalityEntry(
            "up_matic",
            guaranteed=True,
            has_iff=False,
            needs_b=True,
            needs_map=True,
            default_map="mixing",
        ),
        InequalityEntry("gaussian_entropy", guaranteed=True, has_iff=True),
    )
}

assert tuple(REGISTRY) == INEQ_IDS


def get_entry(ineq_id: str) -> InequalityEntry:
    try:
        return REGISTRY[ineq_id]
    except KeyError:
        raise KeyError(
            f"unknown inequality id {ineq_id!r}; known ids: {', '.join(INEQ_IDS)}"
        ) from None


def _worst_condition(reports: list[InequalityReport]) -> float:
    worst = 0.0
    for r in reports:
        for key, value in r.notes.items():
            if key.startswith("cond_") and isinstance(value, float):
                worst = max(worst, value)
    return worst


def witness_with_matrices(
    report: InequalityReport, ins: dict, **extra
) -> InequalityReport:
    wit = dict(report.witness)
    for key, value in ins.items():
        if isinstance(value, np.ndarray):
            wit[f"{key}_text"] = matio.dumps_matrix(value)
    for key, value in extra.items():
        wit[key] = value
    return replace(report, witness=wit)


def run_trials(
    ineq_id: str,
    cfg: SamplerConfig,
    tol: ToleranceConfig = DEFAULT_TOL,
    fn_text: str | None = None,
    mapspec: PositiveMapSpec | None = None,
    fixed_inputs: dict | None = None,
    instances: str = "random",
    jobs: int = 1,
    dump_dir: str | None = None,
) -> list[InequalityReport]:
    """Run cfg.trials seeded trials of one inequality.

    Sampled instances whose inverted matrices exceed the resampling
    condition cap are redrawn (deterministically, from the same stream).
    Records come back ordered by trial index regardless of jobs.
    """
    entry = get_entry(ineq_id)
    fn = entry.resolve_fn(fn_text)

    def one(trial: int) -> list[InequalityReport]:
        rng = trial_rng(cfg.seed, trial)
        for _attempt in range(MAX_RESAMPLE):
            if fixed_inputs is not None:
                ins = dict(fixed_inputs)
                ins.setdefault("part", cfg.partition)
                if entry.needs_fn and "fn" not in ins:
                    ins["fn"] = fn if fn is not None else entry.resolve_fn(None)
                if entry.needs_map and "map" not in ins:
                    ins["map"] = mapspec or entry.default_mapspec(cfg, rng)
            elif instances == "equal":
                ins = entry.make_member(cfg, rng, fn=fn, mapspec=mapspec)
            elif instances == "unequal":
                ins = entry.make_nonmember(cfg, rng, fn=fn, mapspec=mapspec)
            else:
                ins = entry.sample(cfg, rng, fn=fn, mapspec=mapspec)
            try:
                reports = evaluate_inputs(entry, ins, tol)
            except IllConditionedError:
                if fixed_inputs is not None:
                    raise
                continue
            if fixed_inputs is None and _worst_condition(reports) > COND_RESAMPLE:
                continue
            witness = {
                "instance": "file" if fixed_inputs is not None else instances,
                "n": cfg.n,
                "partition": str(cfg.partition),
            }
            if dump_dir is not None:
                for key, value in ins.items():
                    if isinstance(value, np.ndarray):
                        name = f"{ineq_id}_t{trial}_{key}.txt"
                        matio.write_matrix(os.path.join(dump_dir, name), value)
                        witness[key] = name
            return [
                replace(r, trial=trial, seed=cfg.seed, witness=dict(witness))
                for r in reports
            ]
        raise NumericalFailureError(
            f"{ineq_id}: no acceptable instance after {MAX_RESAMPLE} draws (trial {trial})"
        )

    if dump_dir is not None:
        os.makedirs(dump_dir, exist_ok=True)
    if jobs > 1 and cfg.trials > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(one, range(cfg.trials)))
    else:
        chunks = [one(t) for t in range(cfg.trials)]
    return [r for chunk in chunks for r in chunk]
