"""Exact-arithmetic laboratory for nonconventional ergodic averages on
finite measure-preserving Z^{rd}-systems, with a floating-point torus
backend for rotation examples."""

__version__ = "0.1.0"

from .averages import (
    AverageReport,
    FolnerBox,
    average_report,
    contractive_check,
    deviation_bound,
    exact_limit,
    truncated_average,
    vdc_correlation,
    vdc_identity_check,
)
from .errors import (
    BudgetExceeded,
    ErgolabError,
    InternalInvariantViolation,
    InvarianceViolated,
    NotMeasurable,
    UndecidableResonance,
    ValidationError,
)
from .extensions import (
    ExtensionRun,
    ExtensionStage,
    PleasantnessReport,
    is_pleasant,
    iterate_extensions,
    one_step_extension,
    pleasant_decompose,
    pleasant_factor,
    reduce_pleasant_limit,
)
from .factors import (
    Partition,
    action_isotropy,
    cond_expect,
    difference_isotropy,
    is_measurable,
    isotropy_partition,
    join,
)
from .joinings import (
    JoinedMeasure,
    furstenberg_joining,
    hk_condition_check,
    host_kra_tower,
    joining_integral,
    rel_indep_joining,
    vdc_condition_check,
)
from .observables import ExactNorm, Observable
from .system import FiniteSystem, act, period_box, pushforward, validate_system
from .torus import (
    TorusSystem,
    TrigObservable,
    character_limit,
    torus_truncated_average,
)

__all__ = [
    "AverageReport",
    "BudgetExceeded",
    "ErgolabError",
    "ExactNorm",
    "ExtensionRun",
    "ExtensionStage",
    "FiniteSystem",
    "FolnerBox",
    "InternalInvariantViolation",
    "InvarianceViolated",
    "JoinedMeasure",
    "NotMeasurable",
    "Observable",
    "Partition",
    "PleasantnessReport",
    "TorusSystem",
    "TrigObservable",
    "UndecidableResonance",
    "ValidationError",
    "act",
    "action_isotropy",
    "average_report",
    "character_limit",
    "cond_expect",
    "contractive_check",
    "deviation_bound",
    "difference_isotropy",
    "exact_limit",
    "furstenberg_joining",
    "hk_condition_check",
    "host_kra_tower",
    "is_measurable",
    "is_pleasant",
    "isotropy_partition",
    "iterate_extensions",
    "join",
    "joining_integral",
    "one_step_extension",
    "period_box",
    "pleasant_decompose",
    "pleasant_factor",
    "pushforward",
    "reduce_pleasant_limit",
    "rel_indep_joining",
    "torus_truncated_average",
    "truncated_average",
    "validate_system",
    "vdc_condition_check",
    "vdc_correlation",
    "vdc_identity_check",
]
