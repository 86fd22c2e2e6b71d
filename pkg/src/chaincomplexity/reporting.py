"""
Currency datasets and complexity tables.

Datasets are CSV with a header row, optionally preceded by ``# key: value``
metadata lines (``source_date``, ``source_note``)::

    # source_date: 2018-05-12
    name,protocol,block_time_s,hashrate_hs,expected_c_mu,note
    Bitcoin,PoW,600,2.78e19,4.51e-21,

``expected_c_mu`` and ``note`` are optional.  A ``block_time`` column with a
unit (``"10 min"``, ``"60 s"``) may replace ``block_time_s``.  Numbers always
use a decimal point, whatever the locale.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .coinage import hybrid_complexity
from .pow import CurrencyParams, Protocol, pow_complexity

__all__ = [
    "GOLDEN_RTOL",
    "JSON_SCHEMA",
    "ComplexityRow",
    "CurrencyDataset",
    "DatasetError",
    "DatasetRow",
    "analyze_dataset",
    "bundled_dataset",
    "golden_matches",
    "load_currency_dataset",
    "parse_currency_dataset",
    "render_table",
]

#: printed values carry 3 significant figures from rounded inputs
GOLDEN_RTOL = 0.005

_COMPLEXITY = {
    Protocol.POW: pow_complexity,
    Protocol.POS: hybrid_complexity,
    Protocol.HYBRID: hybrid_complexity,
}


class DatasetError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class DatasetRow:
    params: CurrencyParams
    expected_c_mu: float | None = None
    note: str = ""


@dataclass(frozen=True)
class CurrencyDataset:
    entries: tuple[DatasetRow, ...]
    source_date: str = ""
    source_note: str = ""

    @property
    def rows(self) -> tuple[CurrencyParams, ...]:
        return tuple(e.params for e in self.entries)


@dataclass(frozen=True)
class ComplexityRow:
    name: str
    protocol: str
    block_time: float
    hashrate: float
    c_mu: float | None
    c_mu_printed: float | None = None
    note: str = ""
    error: str | None = None

    @property
    def golden_pass(self) -> bool | None:
        if self.c_mu_printed is None:
            return None
        if self.c_mu is None:
            return False
        return golden_matches(self.c_mu, self.c_mu_printed)


def golden_matches(value: float, printed: float, rtol: float = GOLDEN_RTOL) -> bool:
    return abs(value - printed) <= rtol * abs(printed)


# -- loading ------------------------------------------------------------------

_UNITS = {"s": 1.0, "sec": 1.0, "min": 60.0, "h": 3600.0}


def _number(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"not a number: {text!r}", line, column) from None
    if not math.isfinite(value):
        raise DatasetError(f"not finite: {text!r}", line, column)
    return value


def _block_time(text: str, line: int) -> float:
    m = re.fullmatch(r"\s*([0-9.eE+-]+)\s*([a-z]*)\s*", text)
    if not m:
        raise DatasetError(f"cannot read block time {text!r}", line, "block_time")
    unit = m.group(2) or "s"
    if unit not in _UNITS:
        raise DatasetError(f"unknown time unit {unit!r}", line, "block_time")
    return _number(m.group(1), line, "block_time") * _UNITS[unit]


def parse_currency_dataset(text: str) -> CurrencyDataset:
    """Parse dataset text; raises :class:`DatasetError` with the location."""
    meta = {}
    body = []
    first_line = None
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        if first_line is None:
            first_line = number
        body.append((number, raw))
    if not body:
        raise DatasetError("dataset is empty")

    reader = csv.reader([raw for _, raw in body])
    header = [h.strip() for h in next(reader)]
    for required in ("name", "protocol", "hashrate_hs"):
        if required not in header:
            raise DatasetError(f"missing column {required!r}", first_line)
    if "block_time_s" not in header and "block_time" not in header:
        raise DatasetError("missing column 'block_time_s'", first_line)

    entries = []
    names = set()
    for (line, _), cells in zip(body[1:], reader):
        if len(cells) > len(header):
            raise DatasetError(f"{len(cells)} fields for {len(header)} columns", line)
        row = dict(zip(header, (c.strip() for c in cells)))
        name = row.get("name", "")
        if not name:
            raise DatasetError("empty name", line, "name")
        if name in names:
            raise DatasetError(f"duplicate currency {name!r}", line, "name")
        names.add(name)
        try:
            protocol = Protocol.parse(row.get("protocol", ""))
        except ValueError as exc:
            raise DatasetError(str(exc), line, "protocol") from None
        if row.get("block_time_s"):
            block_time = _number(row["block_time_s"], line, "block_time_s")
        elif row.get("block_time"):
            block_time = _block_time(row["block_time"], line)
        else:
            raise DatasetError("missing block time", line, "block_time_s")
        hashrate = _number(row.get("hashrate_hs", ""), line, "hashrate_hs")
        expected = row.get("expected_c_mu") or None
        if expected is not None:
            expected = _number(expected, line, "expected_c_mu")
        try:
            params = CurrencyParams(name, protocol, block_time, hashrate)
        except ValueError as exc:
            column = "block_time_s" if "block_time" in str(exc) else "hashrate_hs"
            raise DatasetError(str(exc), line, column) from None
        entries.append(DatasetRow(params, expected, row.get("note", "")))
    if not entries:
        raise DatasetError("dataset has a header but no rows", first_line)
    return CurrencyDataset(tuple(entries), meta.get("source_date", ""), meta.get("source_note", ""))


def load_currency_dataset(path: str | Path) -> CurrencyDataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror}") from None
    return parse_currency_dataset(text)


def bundled_dataset(name: str) -> CurrencyDataset:
    """``"table1"`` (PoW) or ``"table2"`` (PoS and hybrid)."""
    if name not in ("table1", "table2"):
        raise ValueError(f"no bundled dataset {name!r}")
    text = resources.files("chaincomplexity.data").joinpath(f"{name}.csv").read_text()
    return parse_currency_dataset(text)


# -- analysis -----------------------------------------------------------------

def analyze_dataset(dataset: CurrencyDataset) -> list[ComplexityRow]:
    rows = []
    for entry in dataset.entries:
        p = entry.params
        try:
            c_mu, error = _COMPLEXITY[p.protocol](p), None
        except (ValueError, ArithmeticError) as exc:
            c_mu, error = None, str(exc)
        rows.append(ComplexityRow(p.name, p.protocol.value, p.block_time, p.hashrate,
                                  c_mu, entry.expected_c_mu, entry.note, error))
    return rows


# -- rendering ----------------------------------------------------------------

JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Complexity table",
    "type": "object",
    "required": ["rows"],
    "properties": {
        "source_date": {"type": "string"},
        "source_note": {"type": "string"},
        "rows": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "protocol", "block_time_s", "hashrate_hs", "c_mu",
                             "expected_c_mu", "golden_pass"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "protocol": {"enum": [p.value for p in Protocol]},
                    "block_time_s": {"type": "number", "exclusiveMinimum": 0},
                    "hashrate_hs": {"type": "number", "exclusiveMinimum": 0},
                    "c_mu": {"type": ["number", "null"], "minimum": 0},
                    "expected_c_mu": {"type": ["number", "null"]},
                    "golden_pass": {"type": ["boolean", "null"]},
                    "note": {"type": "string"},
                    "error": {"type": ["string", "null"]},
                },
            },
        },
    },
}

_CSV_FIELDS = ["name", "protocol", "block_time_s", "hashrate_hs", "expected_c_mu",
               "c_mu", "golden_pass", "note"]


def _record(row: ComplexityRow) -> dict:
    return {
        "name": row.name,
        "protocol": row.protocol,
        "block_time_s": row.block_time,
        "hashrate_hs": row.hashrate,
        "c_mu": row.c_mu,
        "expected_c_mu": row.c_mu_printed,
        "golden_pass": row.golden_pass,
        "note": row.note,
        "error": row.error,
    }


def _fmt(value: float | None, spec: str = ".2e") -> str:
    return "-" if value is None else format(value, spec)


def render_table(rows, format: str = "text", source_date: str = "",
                 source_note: str = "") -> str:
    """Render analyzed rows as ``text``, ``csv`` or ``json``.

    Text shows C_mu to three significant figures (``4.51e-21``); CSV and
    JSON carry full precision.  The CSV output can be loaded again as a
    dataset.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("nothing to render")
    if format == "json":
        doc = {"rows": [_record(r) for r in rows]}
        if source_date:
            doc["source_date"] = source_date
        if source_note:
            doc["source_note"] = source_note
        return json.dumps(doc, indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        if source_date:
            buf.write(f"# source_date: {source_date}\n")
        if source_note:
            buf.write(f"# source_note: {source_note}\n")
        writer = csv.DictWriter(buf, _CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in rows:
            rec = _record(r)
            for key in ("block_time_s", "hashrate_hs", "c_mu", "expected_c_mu"):
                rec[key] = "" if rec[key] is None else repr(rec[key])
            rec["golden_pass"] = "" if rec["golden_pass"] is None else str(rec["golden_pass"]).lower()
            writer.writerow(rec)
        return buf.getvalue()
    if format != "text":
        raise ValueError(f"unknown format {format!r}")

    table = [("currency", "protocol", "block time (s)", "hashrate (H/s)", "C_mu (bits)",
              "printed", "check")]
    for r in rows:
        check = {None: "", True: "ok", False: "FAIL"}[r.golden_pass]
        if r.error:
            check = f"error: {r.error}"
        table.append((r.name, r.protocol, format_g(r.block_time), _fmt(r.hashrate),
                      _fmt(r.c_mu), _fmt(r.c_mu_printed), check))
    widths = [max(len(line[i]) for line in table) for i in range(len(table[0]) - 1)]
    out = []
    for line in table:
        cells = [cell.ljust(w) for cell, w in zip(line, widths)] + [line[-1]]
        out.append("  ".join(cells).rstrip())
    notes = [f"  {r.name}: {r.note}" for r in rows if r.note]
    if source_date:
        out.append(f"source date: {source_date}")
    if notes:
        out.append("notes:")
        out.extend(notes)
    return "\n".join(out) + "\n"


def format_g(value: float) -> str:
    return f"{value:g}"
