"""Exact selection and sequencing of accelerated reliability test cases."""

from .errors import (
    AltplanError,
    GuardExceeded,
    Infeasible,
    InstanceValidationError,
    PrecedenceCycleError,
    SchemaError,
    ShapeError,
    UnknownPeriodError,
)
from .evaluation import (
    EffectivenessReport,
    baseline_sequence,
    gap,
    published_comparison,
    run_pipeline,
)
from .fixture import paper_instance
from .instance_io import dump_instance, instance_to_dict, load_instance, read_matrix_csv
from .model import (
    CONDITION_CLASSES,
    ConditionClass,
    Diagnostic,
    Instance,
    PeriodSpec,
    PriorityFactors,
    PriorityPartition,
    PrioritySets,
    condition_class,
    effective_set,
    priority_partition,
    validate,
)
from .selection import (
    SelectionPlan,
    brute_force_selection,
    check_selection,
    selection_objective,
    solve_selection,
)
from .sequencing import (
    Job,
    JobKind,
    JobList,
    Schedule,
    brute_force_sequencing,
    check_milp_constraints,
    evaluate_schedule,
    expand_jobs,
    solve_sequencing,
)

__version__ = "0.1.0"
