"""Recoverability-aware block allocation sandbox.

A small modeled disk, a path-tree filesystem on top of it, allocation
policies that rank unused blocks by a tunable priority score, deterministic
workload simulation with trace replay, post-deletion recovery measurement,
and a tabular reinforcement loop that tunes the ranking coefficients.
"""

from .compare import CompareRow, CompareSettings, run_cell, run_compare
from .disk import TO_UNUSED, TO_USED, Disk, new_disk, transition_block
from .errors import BlockStateError, ConfigError, DiskFullError, TraceError
from .heap import PriorityHeap
from .model import BlockFactors, DiskGeometry, Hyperparams, MrpfRecord, Neighborhood
from .policies import ApexPolicy, FirstFitPolicy, RandomPolicy, make_policy
from .priority import (
    priority_factor,
    record_file_access,
    record_overwrite_event,
    top_unused,
    update_spatial_factors,
)
from .recovery import (
    PerfWeights,
    RecoveryResult,
    access_time_term,
    performance,
    recover_file,
    recovery_table,
    weighted_rr,
)
from .tuner import TrainConfig, TrainReport, TrainSchedule, evaluate_policy, train
from .vfs import DELETED, LINKED, OBSOLETE, PARTIAL, USED, FileRecord, FileSystem
from .workload import (
    SimReport,
    WorkloadConfig,
    WorkloadOp,
    generate_op,
    read_trace,
    replay_trace,
    run_simulation,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "ApexPolicy",
    "BlockFactors",
    "BlockStateError",
    "CompareRow",
    "CompareSettings",
    "ConfigError",
    "DELETED",
    "Disk",
    "DiskFullError",
    "DiskGeometry",
    "FileRecord",
    "FileSystem",
    "FirstFitPolicy",
    "Hyperparams",
    "LINKED",
    "MrpfRecord",
    "Neighborhood",
    "OBSOLETE",
    "PARTIAL",
    "PerfWeights",
    "PriorityHeap",
    "RandomPolicy",
    "RecoveryResult",
    "SimReport",
    "TO_UNUSED",
    "TO_USED",
    "TraceError",
    "TrainConfig",
    "TrainReport",
    "TrainSchedule",
    "USED",
    "WorkloadConfig",
    "WorkloadOp",
    "access_time_term",
    "evaluate_policy",
    "generate_op",
    "make_policy",
    "new_disk",
    "performance",
    "priority_factor",
    "read_trace",
    "record_file_access",
    "record_overwrite_event",
    "recover_file",
    "recovery_table",
    "replay_trace",
    "run_cell",
    "run_compare",
    "run_simulation",
    "top_unused",
    "train",
    "transition_block",
    "update_spatial_factors",
    "weighted_rr",
    "write_trace",
]
