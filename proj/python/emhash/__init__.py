"""Python bindings for the emhash external-memory hashing simulator."""

from ._emhash import (
    AccessKind,
    BlockDevice,
    BootstrapTable,
    ChainedTable,
    ChargingPolicy,
    DeviceError,
    DuplicateError,
    Error,
    GameSpec,
    InvariantError,
    IoLedger,
    LemmaCheck,
    LogSeries,
    ParameterError,
    Params,
    CapacityError,
    PreconditionError,
    bucket_index,
    distinct_workload,
    exhaustive_removal,
    ideal_hash,
    optimal_removal,
    play,
    run,
    validate,
    verify_lemma3,
    verify_lemma4,
)

__all__ = [name for name in dir() if not name.startswith("_")]
