"""Schedulability analysis for end-to-end task chains whose stages carry
mandatory and optional execution parts.

Chains run across fixed-priority preemptive processors; when deadlines or
processor capacity cannot hold the full workload, optional execution is shed
stage by stage, trading result quality (final error) for schedulability.
"""

from ._kernels import backend_name
from .analysis import (
    PROCESSOR_OVERLOAD,
    RESOURCES_EXHAUSTED,
    Verdict,
    effective_deadline,
    imprecise_schedulability_analysis,
    mandatory_only_schedulable,
    normal_schedulability_analysis,
)
from .errors import DomainError, ImpreschedError, InputError, StateError
from .experiments import (
    ExperimentResult,
    MetricRow,
    average_final_error,
    failure_rate,
    run_experiment,
    schedulability_index,
    worst_final_error,
)
from .model import (
    AnalysisReport,
    CompositeTask,
    SubtaskSpec,
    SubtaskState,
    TaskReport,
    TaskSet,
    Violation,
    dump_task_set,
    load_task_set,
    task_set_from_dict,
    task_set_to_dict,
    validate,
)
from .priority import (
    PriorityOrdering,
    PromotionOutcome,
    PromotionResult,
    Scheme,
    assign_priorities,
    mandatory_relevance,
    priority_index_global,
    priority_index_local,
    promote,
)
from .reduction import ReductionResult, final_error, reduce_execution_time
from .rta import RtaResult, analyze, blocking_time, subtask_wcrt
from .simulate import SimTrace, default_horizon, simulate
from .utilization import (
    AdjustmentResult,
    adjust_utilization,
    all_utilizations,
    processor_utilization,
    propagate_input_error,
)
from .workload import (
    GeneratorConfig,
    OverloadPart,
    apply_balanced_overload,
    apply_deadline_reduction,
    apply_frequency_increase,
    apply_task_set_increase,
    apply_unbalanced_overload,
    generate,
    generate_integer_time,
    generator_config_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AdjustmentResult",
    "CompositeTask",
    "DomainError",
    "ExperimentResult",
    "GeneratorConfig",
    "ImpreschedError",
    "InputError",
    "MetricRow",
    "OverloadPart",
    "PriorityOrdering",
    "PromotionOutcome",
    "PromotionResult",
    "PROCESSOR_OVERLOAD",
    "RESOURCES_EXHAUSTED",
    "ReductionResult",
    "RtaResult",
    "Scheme",
    "SimTrace",
    "StateError",
    "SubtaskSpec",
    "SubtaskState",
    "TaskReport",
    "TaskSet",
    "Verdict",
    "Violation",
    "adjust_utilization",
    "all_utilizations",
    "analyze",
    "apply_balanced_overload",
    "apply_deadline_reduction",
    "apply_frequency_increase",
    "apply_task_set_increase",
    "apply_unbalanced_overload",
    "assign_priorities",
    "average_final_error",
    "backend_name",
    "blocking_time",
    "default_horizon",
    "dump_task_set",
    "effective_deadline",
    "failure_rate",
    "final_error",
    "generate",
    "generate_integer_time",
    "generator_config_from_dict",
    "imprecise_schedulability_analysis",
    "load_task_set",
    "mandatory_only_schedulable",
    "mandatory_relevance",
    "normal_schedulability_analysis",
    "priority_index_global",
    "priority_index_local",
    "processor_utilization",
    "promote",
    "propagate_input_error",
    "reduce_execution_time",
    "run_experiment",
    "schedulability_index",
    "simulate",
    "subtask_wcrt",
    "task_set_from_dict",
    "task_set_to_dict",
    "validate",
    "worst_final_error",
]
