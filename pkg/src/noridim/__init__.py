"""Exact computation with finite matrix groups over Z/p^k.

Truncated exponential/logarithm between nilpotents and unipotents,
exhaustive group enumeration, nilpotent-generation (Nori) dimensions,
p-cores, congruence filtrations with their growth law, and a curated
catalog of example groups with declared ground truth.
"""

from .errors import (
    BoundExceeded,
    CapExceeded,
    ContextMismatch,
    InvalidInput,
    InvariantViolation,
    NoridimError,
    NotALift,
    NotDivisible,
    NotInvertible,
    NotNilpotent,
    NotUnipotent,
    PreconditionError,
)
from .expcore import (
    NilpotentMatrix,
    UnipotentMatrix,
    exp_series,
    has_order_p,
    is_nilpotent,
    is_unipotent,
    log_series,
    phi,
    trunc_exp,
    trunc_log,
)
from .fingroup import (
    DEFAULT_CAP,
    EnumeratedGroup,
    NdimReport,
    check_group_axioms,
    element_order,
    enumerate_group,
    exp_generated_subgroup,
    ndim,
    nilpotent_log_set,
    order_p_elements,
    p_core,
)
from .liealg import LieAlgebraFp, bracket, is_nilpotently_generated, lie_closure
from .modring import (
    FpSubspace,
    PrecisionContext,
    ResidueMatrix,
    SpanBuilder,
    span,
    span_rows,
    subspace_leq,
)
from .padic import (
    FiltrationReport,
    TrialSummary,
    check_power_congruence,
    filtration_report,
    filtration_subspace,
    growth_profile,
    run_congruence_trials,
    run_lemma_trials,
    verify_lift_lemma,
)

__version__ = "0.1.0"
