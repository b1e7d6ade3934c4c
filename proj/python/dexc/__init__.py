"""Python bindings for the dexc retargeting library."""

from ._dexc import (
    DivergenceError,
    Error,
    InvalidArgument,
    RunConfig,
    SchemaError,
    add_auc,
    aggregate,
    auc_thresholds,
    evaluate,
    generate_demo,
    load_report,
    prep,
    rot_distance,
    task_reward,
    train,
)

__all__ = [
    "DivergenceError",
    "Error",
    "InvalidArgument",
    "RunConfig",
    "SchemaError",
    "add_auc",
    "aggregate",
    "auc_thresholds",
    "evaluate",
    "generate_demo",
    "load_report",
    "prep",
    "rot_distance",
    "task_reward",
    "train",
]
