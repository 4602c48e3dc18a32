"""Identity reports, bundles and their serialisations (json, table, csv)."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .errors import IoFailure
from .padic import PadicInt

PASS = "PASS"
DISCREPANCY = "DISCREPANCY"
INFO = "INFO"
ERROR = "ERROR"
STATUSES = (PASS, DISCREPANCY, INFO, ERROR)

Claim = Union[int, str]


def classify(measured: Optional[int], claimed: Claim, N: int) -> str:
    """PASS iff measured >= claimed; ``"exact"`` means the working precision N."""
    if claimed == "n/a" or measured is None:
        return INFO
    target = N if claimed == "exact" else claimed
    return PASS if measured >= target else DISCREPANCY


def encode_value(x: Any) -> Any:
    if isinstance(x, PadicInt):
        return {"residue": x.r, "digits": x.digits()}
    if isinstance(x, Fraction):
        return {"norm": str(x)}
    return x


@dataclass
class IdentityReport:
    check_id: str
    params: dict
    lhs: Any = None
    rhs: Any = None
    measured_exponent: Optional[int] = None
    claimed_exponent: Claim = "n/a"
    status: str = INFO
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.check_id,
            "params": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()},
            "lhs": encode_value(self.lhs),
            "rhs": encode_value(self.rhs),
            "measured_exponent": self.measured_exponent,
            "claimed_exponent": self.claimed_exponent,
            "status": self.status,
            "notes": self.notes,
        }


@dataclass
class ReportBundle:
    meta: dict
    reports: list[IdentityReport] = field(default_factory=list)

    def summary(self) -> dict:
        counts = {s: 0 for s in STATUSES}
        for r in self.reports:
            counts[r.status] += 1
        return counts

    @property
    def errored(self) -> bool:
        return any(r.status == ERROR for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "summary": self.summary(),
            "checks": [r.to_dict() for r in self.reports],
        }


def _short(v: Any) -> str:
    v = encode_value(v)
    if isinstance(v, dict):
        if "residue" in v:
            return str(v["residue"])
        return v.get("norm", "")
    return "" if v is None else str(v)


def _params_text(params: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in params.items())


TABLE_COLUMNS = ("id", "params", "lhs", "rhs", "measured", "claimed", "status")


def render_table(bundle: ReportBundle) -> str:
    rows = [TABLE_COLUMNS]
    for r in bundle.reports:
        rows.append((r.check_id, _params_text(r.params), _short(r.lhs), _short(r.rhs),
                     "" if r.measured_exponent is None else str(r.measured_exponent),
                     str(r.claimed_exponent), r.status))
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def render_json(bundle: ReportBundle) -> str:
    return json.dumps(bundle.to_dict(), indent=2) + "\n"


def render_csv(bundle: ReportBundle) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "params", "lhs_residue", "lhs_digits", "rhs_residue", "rhs_digits",
                "measured_exponent", "claimed_exponent", "status", "notes"])
    for r in bundle.reports:
        d = r.to_dict()
        cells = []
        for side in (d["lhs"], d["rhs"]):
            if isinstance(side, dict) and "residue" in side:
                cells += [side["residue"], side["digits"]]
            elif isinstance(side, dict):
                cells += ["", side["norm"]]
            else:
                cells += ["", ""]
        w.writerow([d["id"], json.dumps(d["params"]), *cells, d["measured_exponent"],
                    d["claimed_exponent"], d["status"], d["notes"]])
    return buf.getvalue()


RENDERERS = {"table": render_table, "json": render_json, "csv": render_csv}


def emit(bundle: ReportBundle, fmt: str = "json", path: Optional[str] = None) -> str:
    """Serialise ``bundle``; write to ``path`` when given.  Returns the text."""
    if fmt not in RENDERERS:
        raise ValueError(f"unknown format {fmt!r}")
    text = RENDERERS[fmt](bundle)
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc
    return text
