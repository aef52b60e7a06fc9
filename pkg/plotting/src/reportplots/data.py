"""Summary CSV parsing and validation."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

EXPECTED_COLUMNS = [
    "controller",
    "scenario",
    "q",
    "f",
    "n_runs",
    "mean_delay_s",
    "sd_delay_s",
    "ci95_half_width_s",
]


class SummaryFormatError(Exception):
    """The CSV does not carry the expected summary schema."""


@dataclass(frozen=True)
class SummaryRow:
    controller: str
    scenario: str
    q: float
    f: float
    n_runs: int
    mean_delay_s: Optional[float]
    sd_delay_s: Optional[float]
    ci95_half_width_s: Optional[float]


def _opt_float(text: str) -> Optional[float]:
    return float(text) if text not in ("", None) else None


def load_summary(path: str) -> list[SummaryRow]:
    """Read and validate a summary CSV; empty-cell rows keep None statistics."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SummaryFormatError(f"{path}: empty file") from None
        if header != EXPECTED_COLUMNS:
            missing = [c for c in EXPECTED_COLUMNS if c not in header]
            raise SummaryFormatError(
                f"{path}: unexpected header {header!r}"
                + (f" (missing columns: {', '.join(missing)})" if missing else "")
            )
        rows = []
        for lineno, record in enumerate(reader, 2):
            if not record or record == [""]:
                continue
            if len(record) != len(EXPECTED_COLUMNS):
                raise SummaryFormatError(f"{path}:{lineno}: expected 8 fields")
            rows.append(
                SummaryRow(
                    controller=record[0],
                    scenario=record[1].upper(),
                    q=float(record[2]),
                    f=float(record[3]),
                    n_runs=int(record[4]),
                    mean_delay_s=_opt_float(record[5]),
                    sd_delay_s=_opt_float(record[6]),
                    ci95_half_width_s=_opt_float(record[7]),
                )
            )
    return rows
