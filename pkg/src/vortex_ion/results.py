"""Result tables and their deterministic CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import ConfigError


def _cell(value):
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, Fraction):
        return float(value)
    if hasattr(value, "twice_value"):
        return value.twice_value / 2
    if isinstance(value, float):
        return float(value)
    if isinstance(value, int):
        return int(value)
    if hasattr(value, "item"):
        return value.item()
    return value


def _text(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class ResultTable:
    """Column names, a units row, data rows, and provenance."""

    command: str
    columns: list
    units: list
    rows: list
    config_hash: str
    meta: dict = field(default_factory=dict)
    version: str = __version__

    def __post_init__(self):
        if len(self.units) != len(self.columns):
            raise ValueError("units row must match the columns")
        self.rows = [[_cell(v) for v in row] for row in self.rows]
        self.meta = {k: _cell(v) for k, v in self.meta.items()}
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row length does not match the columns")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    @property
    def provenance(self) -> dict:
        return {"artifact": "vortex-ion", "version": self.version, "command": self.command,
                "config_sha256": self.config_hash}

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.provenance.items():
            buf.write(f"# {key}: {value}\n")
        for key in sorted(self.meta):
            buf.write(f"# meta.{key}: {_text(self.meta[key])}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerow(self.units)
        for row in self.rows:
            writer.writerow([_text(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "provenance": self.provenance,
            "meta": {k: self.meta[k] for k in sorted(self.meta)},
            "columns": self.columns,
            "units": self.units,
            "rows": self.rows,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ConfigError(f"unknown output format {fmt!r}")


def _parse_scalar(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_csv(text: str) -> ResultTable:
    prov, meta, body = {}, {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            if key.startswith("meta."):
                meta[key[5:]] = _parse_scalar(value)
            else:
                prov[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return ResultTable(command=prov.get("command", ""), columns=rows[0], units=rows[1],
                       rows=[[_parse_scalar(v) for v in r] for r in rows[2:]],
                       config_hash=prov.get("config_sha256", ""), meta=meta,
                       version=prov.get("version", ""))


def read_json(text: str) -> ResultTable:
    doc = json.loads(text)
    prov = doc["provenance"]
    return ResultTable(command=prov["command"], columns=doc["columns"], units=doc["units"],
                       rows=doc["rows"], config_hash=prov["config_sha256"], meta=doc["meta"],
                       version=prov["version"])


def load_result(path, expected_hash: str | None = None) -> ResultTable:
    """Read a CSV or JSON result; reject it if its config hash is not ``expected_hash``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    table = read_json(text) if text.lstrip().startswith("{") else read_csv(text)
    if expected_hash is not None and table.config_hash != expected_hash:
        raise ConfigError(
            f"{path}: config hash {table.config_hash} does not match expected {expected_hash}")
    return table
