"""Stretch-minimizing schedules (SRPT, SPT, POS, OMMS, SPTM, D-SPTM) and exact checks of their competitive ratios."""

__version__ = "0.1.0"

from .model import (
    Instance,
    Job,
    Schedule,
    ScheduleError,
    Segment,
    StretchConvention,
    delta_ratio,
    is_compact,
    stretch_report,
    total_stretch,
    validate_schedule,
)
from .single import finished_count, spt_schedule, srpt_schedule
from .forest import active_intervals, build_forest, pos_schedule
from .parallel import (
    dsptm_schedule,
    omms_schedule,
    partition_blocks,
    sptm_schedule,
    virtual_instance,
)
from .oracle import (
    OracleLimitError,
    competitive_bound,
    optimal_nonpreemptive,
    parallel_lower_bound,
    spt_to_pos_delta_audit,
    srpt_dominates_optimal_check,
    swap_delta,
)
from .gen import GenConfig, adversarial_family, random_instance

__all__ = [
    "GenConfig",
    "Instance",
    "Job",
    "OracleLimitError",
    "Schedule",
    "ScheduleError",
    "Segment",
    "StretchConvention",
    "active_intervals",
    "adversarial_family",
    "build_forest",
    "competitive_bound",
    "delta_ratio",
    "dsptm_schedule",
    "finished_count",
    "is_compact",
    "omms_schedule",
    "optimal_nonpreemptive",
    "parallel_lower_bound",
    "partition_blocks",
    "pos_schedule",
    "random_instance",
    "spt_schedule",
    "spt_to_pos_delta_audit",
    "sptm_schedule",
    "srpt_dominates_optimal_check",
    "srpt_schedule",
    "stretch_report",
    "swap_delta",
    "total_stretch",
    "validate_schedule",
    "virtual_instance",
]
