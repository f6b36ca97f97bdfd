"""Numerical verification of determinant and operator inequalities on
finite-dimensional matrix algebras: the normalized (Fuglede-Kadison)
determinant, pinching conditional expectations, operator monotone and
convex function certificates, and per-inequality verifiers with equality
diagnosis."""

from .errors import (
    DomainError,
    HermiticityError,
    IllConditionedError,
    NumericalFailureError,
    RegularityError,
    SpecificationError,
)
from .fkdet import FKValue, fk_det, fk_det_ratio, fk_log_det
from .linalg import (
    DEFAULT_TOL,
    Spectrum,
    ToleranceConfig,
    apply_fn,
    eig_hermitian,
    is_pd,
    is_psd,
    normalized_trace,
    schur_complement,
)
from .opfuncs import (
    ConvexRep,
    MonotoneRep,
    NamedFunction,
    default_catalog,
    eval_on_matrix,
    eval_scalar,
    loewner_matrix,
    parse_function,
    sample_convex,
    sample_monotone,
    shift,
)
from .registry import REGISTRY, get_entry, run_trials
from .sampling import (
    SamplerConfig,
    falsify,
    haar_unitary,
    random_hermitian,
    random_member,
    random_nonmember,
    random_pd,
    random_psd_singular,
)
from .subalgebra import (
    BlockPartition,
    PositiveMapSpec,
    apply_map,
    check_expectation_axioms,
    check_two_positivity,
    is_member,
    pinch,
)
from .verifiers import (
    INEQ_IDS,
    InequalityReport,
    v_arveson,
    v_counterexample_matic_var,
    v_det_monotone,
    v_det_perturb,
    v_fischer,
    v_gaussian_entropy,
    v_hadamard,
    v_inverse,
    v_logconvex_det,
    v_matic1,
    v_matic2,
    v_op_convex,
    v_op_monotone,
    v_resolvent,
    v_square,
    v_trace_jensen,
    v_unit_positive_hadamard,
    v_unit_positive_matic,
    v_unit_positive_perturb,
)

__version__ = "0.1.0"
