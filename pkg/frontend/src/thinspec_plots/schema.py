"""Readers for the versioned thinspec CSV schemas.

This package talks to the solver package only through its documented file
formats: every CSV opens with `# thinspec-csv/<major> kind=<kind>` and a
column-header row. The readers here are deliberately independent of the
solver's own serialization code and reject anything off-schema with a
message naming the offending line or column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

SCHEMA_MAJOR = 1
_SCHEMA_RE = re.compile(r"#\s*thinspec-csv/(\d+)\s+kind=([\w-]+)\s*$")

_HEADERS = {
    "butterfly": "p,q,band_index,lo,hi",
    "bands": "k,a_k,b_k,gap_after",
    "intervals": "lo,hi",
    "discriminant": "E,D",
    "approximants": "level,p,q,measure,band_count",
    "boxdim": "eps,count",
}


class SchemaError(ValueError):
    """Input does not conform to a recognized thinspec CSV schema."""


def _read_rows(path, kind: str) -> list[list[str]]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file, expected '# thinspec-csv/1 kind={kind}'")
    m = _SCHEMA_RE.match(lines[0].strip())
    if not m:
        raise SchemaError(f"{path}: line 1 is not a thinspec-csv schema line")
    major, found = int(m.group(1)), m.group(2)
    if major != SCHEMA_MAJOR:
        raise SchemaError(f"{path}: unsupported schema major version {major}")
    if found != kind:
        raise SchemaError(f"{path}: kind '{found}', expected '{kind}'")
    header = _HEADERS[kind]
    if len(lines) < 2 or lines[1].strip() != header:
        raise SchemaError(f"{path}: line 2 must be the column header '{header}'")
    want = header.count(",") + 1
    rows = []
    for i, ln in enumerate(lines[2:], start=3):
        if not ln.strip():
            continue
        parts = ln.split(",")
        if len(parts) != want:
            raise SchemaError(
                f"{path}: line {i} has {len(parts)} columns, expected {want} ({header})")
        rows.append(parts)
    return rows


def _parse(path, kind, line_no, column, text, conv):
    try:
        return conv(text)
    except ValueError as exc:
        raise SchemaError(
            f"{path}: line {line_no}, column '{column}': {text!r} is not a valid "
            f"{conv.__name__}") from exc


@dataclass(frozen=True)
class ButterflyBand:
    frequency: Fraction
    band_index: int
    lo: float
    hi: float


def read_butterfly(path) -> list[ButterflyBand]:
    out = []
    for i, (p, q, idx, lo, hi) in enumerate(_read_rows(path, "butterfly"), start=3):
        out.append(ButterflyBand(
            Fraction(_parse(path, "butterfly", i, "p", p, int),
                     _parse(path, "butterfly", i, "q", q, int)),
            _parse(path, "butterfly", i, "band_index", idx, int),
            _parse(path, "butterfly", i, "lo", lo, float),
            _parse(path, "butterfly", i, "hi", hi, float)))
    return out


def read_bands(path) -> list[tuple[int, float, float, float]]:
    return [(
        _parse(path, "bands", i, "k", k, int),
        _parse(path, "bands", i, "a_k", a, float),
        _parse(path, "bands", i, "b_k", b, float),
        _parse(path, "bands", i, "gap_after", g, float),
    ) for i, (k, a, b, g) in enumerate(_read_rows(path, "bands"), start=3)]


def read_discriminant(path) -> list[tuple[float, float]]:
    return [(
        _parse(path, "discriminant", i, "E", e, float),
        _parse(path, "discriminant", i, "D", d, float),
    ) for i, (e, d) in enumerate(_read_rows(path, "discriminant"), start=3)]


def read_approximants(path) -> list[dict]:
    out = []
    for i, (lvl, p, q, m, n) in enumerate(_read_rows(path, "approximants"), start=3):
        out.append({
            "level": _parse(path, "approximants", i, "level", lvl, int),
            "p": _parse(path, "approximants", i, "p", p, int),
            "q": _parse(path, "approximants", i, "q", q, int),
            "measure": _parse(path, "approximants", i, "measure", m, float),
            "band_count": _parse(path, "approximants", i, "band_count", n, int),
        })
    return out


def read_boxdim(path) -> list[tuple[float, int]]:
    return [(
        _parse(path, "boxdim", i, "eps", e, float),
        _parse(path, "boxdim", i, "count", c, int),
    ) for i, (e, c) in enumerate(_read_rows(path, "boxdim"), start=3)]
