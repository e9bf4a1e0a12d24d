"""Classification, capacities and rate regions of two-user discrete interference channels."""

from .capacity import (
    AuxiliaryInput,
    achievable_region_mixed,
    achievable_region_zic,
    attach_y2prime,
    bc_outer_bound,
    bijection_map,
    gaussian_reference,
    lemma1_corners,
    region_extreme_points,
    simple_outer_bound,
    sumrate_mixed,
    sumrate_weak_zic,
    theorem1_objective,
    theorem3_objective,
    xor_map,
)
from .channel import (
    CONDITIONS,
    ClassificationReport,
    ConditionRecord,
    Dmic,
    ProductInput,
    check_degraded,
    classify,
    classify_one_sided,
    factorize_weak,
    induced_joint,
    mi_condition_report,
)
from .channels import builtin_channel
from .errors import (
    ChannelSpecError,
    DmicError,
    MarkovViolationError,
    NonIdentifiableError,
    NumericError,
    PreconditionError,
    ProbabilityError,
)
from .io import emit_region_csv, parse_channel_spec, read_region_csv, serialize_channel
from .optimize import OptimizerConfig, OptResult, blahut_arimoto, grid_oracle, maximize_product_input
from .probcore import (
    CondDist,
    Dist,
    JointDist,
    binary_entropy,
    conditional_mutual_information,
    entropy,
    is_markov_chain,
    mutual_information,
)
from .regions import RatePoint, RateRegion
from .transform import SignedCondTable, solve_degradation_table, weak_alt_gap_surface

__version__ = "0.1.0"
