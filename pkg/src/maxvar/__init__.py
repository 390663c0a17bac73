"""Exact rational evaluation of one-dimensional nontangential maximal
operators, total variation bookkeeping, claim verification, and
counterexample search."""

from .core import (
    DiscreteFunction,
    DiscreteWindow,
    Interval,
    OperatorParams,
    Rounding,
    StepFunction,
    as_rational,
    average_discrete,
    average_step,
    function_from_json_dict,
    rational_to_str,
)
from .continuous import (
    ConeConstraint,
    SixPartition,
    StepPeakWitness,
    WitnessNotFound,
    find_peak_witness,
    maximal_at_step,
    maximal_values_on_grid,
)
from .discrete import (
    PointEvaluation,
    admissible,
    maximal_at,
    maximal_on_range,
    search_radius_bound,
    tail_limit,
)
from .search import (
    BudgetExceeded,
    RandomSweepConfig,
    SearchSpace,
    ViolationRecord,
    exhaustive_sweep,
    random_sweep,
    reverify,
    shrink,
)
from .variation import (
    Decomposition,
    Peak,
    PeakSystem,
    SmallerPointNotFound,
    decompose,
    find_smaller_point,
    total_variation,
    total_variation_step,
    variation_over_sites,
)
from .verify import (
    ClaimId,
    DiscreteProfile,
    ExtremosWitness,
    PlateauWitness,
    Verdict,
    VerificationReport,
    check_lemma_dominate,
    check_lemma_plateau,
    check_peak_transfer,
    check_prop_extremos,
    check_prop_extremos_all,
    check_theorem_continuous_grid,
    check_theorem_discrete,
    compute_profile,
    default_range,
    make_uniform_grid,
    radius_induction_first_failure,
    refine_grid,
)

__version__ = "0.1.0"
