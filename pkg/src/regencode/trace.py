"""Repair trace records and their CSV form.

Every repair operation in the package reports what moved: which node
was rebuilt, who helped, and how many symbols each helper shipped.
The CSV layout is ``epoch,failed,helpers,symbols_moved,audit`` with
helpers joined by ``+`` so the line stays a single CSV field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CodingError

CSV_HEADER = "epoch,failed,helpers,symbols_moved,audit"


@dataclass(frozen=True)
class RepairTrace:
    epoch: int
    failed: int
    helpers: tuple[int, ...]
    per_helper: tuple[int, ...]
    total_symbols: int
    audit_ok: bool
    family: str = ""

    def __post_init__(self):
        if len(self.helpers) != len(self.per_helper):
            raise CodingError("helper list and per-helper counts disagree")
        if sum(self.per_helper) != self.total_symbols:
            raise CodingError("per-helper symbol counts do not add up")

    def csv_line(self) -> str:
        helpers = "+".join(str(h) for h in self.helpers)
        return (
            f"{self.epoch},{self.failed},{helpers},"
            f"{self.total_symbols},{str(self.audit_ok).lower()}"
        )


def traces_csv(traces) -> str:
    lines = [CSV_HEADER]
    lines.extend(t.csv_line() for t in traces)
    return "\n".join(lines) + "\n"
