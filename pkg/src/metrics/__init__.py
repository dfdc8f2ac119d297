from src.metrics.buffer_model import (
    BufferModelInputs,
    buffer_bits,
    buffer_bits_for_model,
    buffer_inputs_for_model,
    cost_table,
)
from src.metrics.counts import count_parameters, count_sops, count_spikes
from src.metrics.report import MetricsReport, report, rows_to_csv, rows_to_json, write_rows

__all__ = [
    "BufferModelInputs",
    "buffer_bits",
    "buffer_bits_for_model",
    "buffer_inputs_for_model",
    "cost_table",
    "count_parameters",
    "count_sops",
    "count_spikes",
    "MetricsReport",
    "report",
    "rows_to_csv",
    "rows_to_json",
    "write_rows",
]
