"""Repair trace bookkeeping."""

import pytest

from regencode.errors import CodingError
from regencode.trace import CSV_HEADER, RepairTrace, traces_csv


def test_csv_line_layout():
    t = RepairTrace(
        epoch=3,
        failed=1,
        helpers=(0, 2, 4),
        per_helper=(1, 1, 2),
        total_symbols=4,
        audit_ok=True,
    )
    assert t.csv_line() == "3,1,0+2+4,4,true"


def test_audit_false_renders_lowercase():
    t = RepairTrace(0, 2, (1,), (5,), 5, False)
    assert t.csv_line().endswith(",false")


def test_counts_must_sum():
    with pytest.raises(CodingError):
        RepairTrace(0, 1, (0, 2), (1, 1), 3, True)


def test_helper_lists_must_align():
    with pytest.raises(CodingError):
        RepairTrace(0, 1, (0, 2, 3), (1, 1), 2, True)


def test_traces_csv_document():
    traces = [
        RepairTrace(0, 4, (0, 1, 2), (1, 1, 1), 3, True),
        RepairTrace(1, 0, (1, 2, 3), (2, 2, 2), 6, True),
    ]
    doc = traces_csv(traces)
    lines = doc.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "0,4,0+1+2,3,true"
    assert lines[2] == "1,0,1+2+3,6,true"
    assert doc.endswith("\n")


def test_empty_trace_list_still_has_header():
    assert traces_csv([]) == CSV_HEADER + "\n"


def test_no_helpers_is_legal():
    # a full-decode rebuild can come from the decoder itself
    t = RepairTrace(0, 1, (), (), 0, True)
    assert t.csv_line() == "0,1,,0,true"
