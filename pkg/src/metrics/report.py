import csv
import io
import json
from dataclasses import asdict, dataclass, fields

from src.metrics.buffer_model import buffer_bits
from src.metrics.counts import count_sops, count_spikes

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class MetricsReport:
    total_spikes: int
    sops: int
    buffer_bits: int
    accuracy: float

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def to_dict(self):
        return asdict(self)


def report(record, model, buffer_inputs, accuracy):
    return MetricsReport(
        total_spikes=count_spikes(record),
        sops=count_sops(record, model),
        buffer_bits=buffer_bits(buffer_inputs),
        accuracy=float(accuracy),
    )


def format_value(value):
    if isinstance(value, float):
        return f"{value:.8g}"
    return value


def rows_to_csv(rows, columns=None):
    rows = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in rows]
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: format_value(row.get(k, "")) for k in columns})
    return buffer.getvalue()


def rows_to_json(rows):
    rows = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in rows]
    return json.dumps({"schema_version": REPORT_SCHEMA_VERSION, "rows": rows}, indent=4, sort_keys=True) + "\n"


def write_rows(rows, path, fmt="csv", columns=None):
    text = rows_to_json(rows) if fmt == "json" else rows_to_csv(rows, columns)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return text
