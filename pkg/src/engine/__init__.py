from src.engine.buffers import RingBuffer, SharedQueue
from src.engine.compile import EventLayer, EventModel, compile_model, fold_batch_norm
from src.engine.runner import (
    OCCUPANCY_COLUMNS,
    EngineResult,
    EventEngine,
    aggregate_occupancy,
    check_equivalence,
    occupancy_report,
    reference_forward,
    run,
)

__all__ = [
    "RingBuffer",
    "SharedQueue",
    "EventLayer",
    "EventModel",
    "compile_model",
    "fold_batch_norm",
    "OCCUPANCY_COLUMNS",
    "aggregate_occupancy",
    "EngineResult",
    "EventEngine",
    "check_equivalence",
    "occupancy_report",
    "reference_forward",
    "run",
]
