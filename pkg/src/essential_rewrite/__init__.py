"""A lambda-calculus workbench for essential reduction strategies.

Four strategies over one term language: head, weak call-by-value,
leftmost-outermost and least-level reduction, each paired with its
inessential complement, indexed parallel steps, constructive factorization
and normalization, and an exhaustive property harness.
"""

from .terms import (
    App,
    Free,
    Lam,
    ParseError,
    Position,
    Term,
    Var,
    alpha_eq,
    count_occurrences,
    free_names,
    instantiate,
    is_closed,
    is_neutral,
    is_normal,
    is_value,
    parse,
    show,
    size,
    substitute,
)
from .reductions import (
    Base,
    INFINITY,
    Level,
    Step,
    StepKind,
    SystemId,
    beta_redexes,
    betav_redexes,
    head_step,
    head_steps,
    least_level,
    level_indexed_steps,
    ll_steps,
    lo_step,
    lo_steps,
    neg_head_steps,
    neg_ll_steps,
    neg_lo_steps,
    neg_weak_steps,
    step_at,
    weak_cbv_steps,
)
from .parallel import (
    Flavor,
    ParDerivation,
    all_parallel_steps,
    derive,
    identity_derivation,
    is_parallel_inessential,
    parallel_level,
    realize,
    selection_of,
    sequential_index,
    sequentialize,
    subst_parallel,
)
from .engine import (
    EssentialSystem,
    Factorization,
    Outcome,
    Report,
    SYSTEMS,
    Trace,
    check_normalization,
    check_property,
    check_subst_index,
    factorize,
    get_system,
    merge,
    normalize,
    split,
    trace_from_positions,
)
from .enumeration import EnumSpec, count_terms, enumerate_terms, random_term
from .graphs import Decision, ReductionGraph, explore, path_exists, strongly_normalizing, weakly_normalizing

__version__ = "0.1.0"
