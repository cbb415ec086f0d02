"""Check-result rows and their JSON/CSV emission."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """One verified estimate: measured value against its bound, slack printed."""

    check: str
    bound: float
    measured: float
    slack: float
    passed: bool
    details: dict = field(default_factory=dict)

    def row(self, space: str = "", size: int = 0) -> dict:
        return {
            "check": self.check,
            "space": space,
            "size": int(size),
            "bound": float(self.bound),
            "measured": float(self.measured),
            "slack": float(self.slack),
            "pass": bool(self.passed),
        }


CSV_FIELDS = ["check", "space", "size", "bound", "measured", "slack", "pass"]


def rows_of(results, space: str = "", size: int = 0) -> list[dict]:
    """Flatten CheckResults (or iterables of them) into report rows."""
    rows = []
    for r in results:
        if isinstance(r, CheckResult):
            rows.append(r.row(space, size))
        elif isinstance(r, dict):
            rows.append({k: r.get(k, "") for k in CSV_FIELDS})
        else:
            rows.extend(rows_of(r, space, size))
    return rows


def write_json(rows: list[dict], path: str) -> None:
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in CSV_FIELDS})


def all_passed(rows: list[dict]) -> bool:
    return all(r.get("pass") in (True, "True", "true") for r in rows)
