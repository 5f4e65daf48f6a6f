"""Compare an analyzer MSA CSV against a simulated one."""

from __future__ import annotations

import csv
import math


def read_msa_csv(path: str) -> list[dict]:
    rows = []
    with open(path) as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                {
                    "direction": (float(rec["dx"]), float(rec["dy"]), float(rec["dz"])),
                    "msa": math.inf if rec["msa"] == "inf" else float(rec["msa"]),
                }
            )
    return rows


def compare(primary_csv: str, sim_csv: str, tolerance: float = 0.15) -> dict:
    """Per-direction relative error report.

    Directions must match row-for-row; a finite value on one side paired
    with an infinity on the other is a flagged discrepancy. The summary
    passes when every comparable direction is within `tolerance` relative
    error and nothing is flagged.
    """
    a = read_msa_csv(primary_csv)
    b = read_msa_csv(sim_csv)
    if len(a) != len(b):
        raise ValueError(f"direction sets differ in size ({len(a)} vs {len(b)})")
    entries = []
    worst = 0.0
    flagged = 0
    for ra, rb in zip(a, b):
        if any(abs(x - y) > 1e-9 for x, y in zip(ra["direction"], rb["direction"])):
            raise ValueError(f"mismatched directions {ra['direction']} vs {rb['direction']}")
        pa, pb = ra["msa"], rb["msa"]
        if math.isinf(pa) and math.isinf(pb):
            entry = {"direction": ra["direction"], "error": 0.0, "status": "ok"}
        elif math.isinf(pa) != math.isinf(pb):
            flagged += 1
            entry = {"direction": ra["direction"], "error": math.inf, "status": "flagged"}
        else:
            err = abs(pb - pa) / max(abs(pa), 1e-9)
            worst = max(worst, err)
            entry = {
                "direction": ra["direction"],
                "primary": pa,
                "simulated": pb,
                "error": err,
                "status": "ok" if err <= tolerance else "fail",
            }
        entries.append(entry)
    ok = flagged == 0 and all(e["status"] == "ok" for e in entries)
    return {
        "directions": len(entries),
        "tolerance": tolerance,
        "max_relative_error": worst,
        "flagged_infinities": flagged,
        "passed": ok,
        "entries": entries,
    }
