"""Versioned CSV/JSON serialization for spectra and reports.

Every CSV starts with a schema line `# thinspec-csv/<major> kind=<kind>`
followed by a column-header row; floats are written with 17 significant
digits, which round-trips IEEE doubles bit-exactly through the decimal form.
Readers reject unknown major versions and unexpected kinds.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .errors import SchemaError
from .intervals import DEFAULT_MERGE_TOL, Interval, IntervalUnion, normalize

SCHEMA_MAJOR = 1
_SCHEMA_RE = re.compile(r"#\s*thinspec-csv/(\d+)\s+kind=([\w-]+)\s*$")


def fmt(x: float) -> str:
    """17-significant-digit decimal form (bit-exact round trip)."""
    return format(float(x), ".17g")


def _schema_line(kind: str) -> str:
    return f"# thinspec-csv/{SCHEMA_MAJOR} kind={kind}"


def _check_header(lines: list[str], kind: str, path) -> int:
    if not lines:
        raise SchemaError(f"{path}: empty file, expected a thinspec-csv header")
    m = _SCHEMA_RE.match(lines[0].strip())
    if not m:
        raise SchemaError(f"{path}: missing schema line '# thinspec-csv/1 kind=...'")
    major, found = int(m.group(1)), m.group(2)
    if major != SCHEMA_MAJOR:
        raise SchemaError(f"{path}: schema major version {major} not supported")
    if kind is not None and found != kind:
        raise SchemaError(f"{path}: kind '{found}', expected '{kind}'")
    return 1


def write_intervals_csv(u: IntervalUnion, path) -> None:
    lines = [_schema_line("intervals"), "lo,hi"]
    lines += [f"{fmt(iv.lo)},{fmt(iv.hi)}" for iv in u.intervals]
    Path(path).write_text("\n".join(lines) + "\n")


def read_intervals_csv(path, merge_tol: float = DEFAULT_MERGE_TOL) -> IntervalUnion:
    lines = Path(path).read_text().splitlines()
    start = _check_header(lines, "intervals", path)
    if len(lines) <= start or lines[start].strip() != "lo,hi":
        raise SchemaError(f"{path}: expected header row 'lo,hi'")
    ivs = []
    for ln in lines[start + 1:]:
        if not ln.strip():
            continue
        lo, hi = ln.split(",")
        ivs.append(Interval(float(lo), float(hi)))
    return normalize(ivs, merge_tol)


def intervals_to_json(u: IntervalUnion) -> str:
    # json floats serialize via repr, which round-trips doubles bit-exactly
    return json.dumps([[iv.lo, iv.hi] for iv in u.intervals])


def intervals_from_json(text: str, merge_tol: float = DEFAULT_MERGE_TOL) -> IntervalUnion:
    data = json.loads(text)
    return normalize([Interval(float(lo), float(hi)) for lo, hi in data], merge_tol)


def write_bands_csv(bands, path, gaps_after=None) -> None:
    """Band rows k,a_k,b_k,gap_after; gap_after of the last band defaults to 0."""
    bands = list(bands)
    if gaps_after is None:
        gaps_after = [nxt.lo - cur.hi for cur, nxt in zip(bands, bands[1:])] + [0.0]
    lines = [_schema_line("bands"), "k,a_k,b_k,gap_after"]
    for k, (band, gap) in enumerate(zip(bands, gaps_after), start=1):
        lines.append(f"{k},{fmt(band.lo)},{fmt(band.hi)},{fmt(gap)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_bands_csv(path, merge_tol: float = DEFAULT_MERGE_TOL) -> IntervalUnion:
    lines = Path(path).read_text().splitlines()
    start = _check_header(lines, "bands", path)
    if len(lines) <= start or lines[start].strip() != "k,a_k,b_k,gap_after":
        raise SchemaError(f"{path}: expected header row 'k,a_k,b_k,gap_after'")
    ivs = []
    for ln in lines[start + 1:]:
        if not ln.strip():
            continue
        _, a, b, _ = ln.split(",")
        ivs.append(Interval(float(a), float(b)))
    return normalize(ivs, merge_tol)


def read_spectrum_csv(path, merge_tol: float = DEFAULT_MERGE_TOL) -> IntervalUnion:
    """Read either an intervals CSV or a bands CSV as a set."""
    lines = Path(path).read_text().splitlines()
    _check_header(lines, None, path)
    m = _SCHEMA_RE.match(lines[0].strip())
    kind = m.group(2)
    if kind == "intervals":
        return read_intervals_csv(path, merge_tol)
    if kind == "bands":
        return read_bands_csv(path, merge_tol)
    raise SchemaError(f"{path}: kind '{kind}' is not a spectrum schema")


def write_butterfly_csv(rows, path) -> None:
    """Rows of (p, q, spectrum) as p,q,band_index,lo,hi lines."""
    lines = [_schema_line("butterfly"), "p,q,band_index,lo,hi"]
    for row in rows:
        for i, iv in enumerate(row.spectrum.intervals):
            lines.append(f"{row.p},{row.q},{i},{fmt(iv.lo)},{fmt(iv.hi)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_butterfly_csv(path, merge_tol: float = DEFAULT_MERGE_TOL):
    """Returns a list of (Fraction(p, q), IntervalUnion) sorted by p/q."""
    lines = Path(path).read_text().splitlines()
    start = _check_header(lines, "butterfly", path)
    if len(lines) <= start or lines[start].strip() != "p,q,band_index,lo,hi":
        raise SchemaError(f"{path}: expected header row 'p,q,band_index,lo,hi'")
    acc: dict[tuple[int, int], list[Interval]] = {}
    for ln in lines[start + 1:]:
        if not ln.strip():
            continue
        p, q, _, lo, hi = ln.split(",")
        acc.setdefault((int(p), int(q)), []).append(Interval(float(lo), float(hi)))
    out = [(Fraction(p, q), normalize(ivs, merge_tol)) for (p, q), ivs in acc.items()]
    out.sort(key=lambda t: t[0])
    return out


def write_approximants_csv(reports, path) -> None:
    lines = [_schema_line("approximants"), "level,p,q,measure,band_count"]
    for r in reports:
        lines.append(f"{r.level},{r.rational.numerator},{r.rational.denominator},"
                     f"{fmt(r.measure)},{r.band_count}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_boxdim_csv(est, path) -> None:
    lines = [_schema_line("boxdim"), "eps,count"]
    for eps, count in zip(est.scales, est.counts):
        lines.append(f"{fmt(eps)},{count}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_discriminant_csv(energies, dvals, path) -> None:
    lines = [_schema_line("discriminant"), "E,D"]
    lines += [f"{fmt(e)},{fmt(d)}" for e, d in zip(energies, dvals)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json_report(obj: dict, path) -> None:
    payload = {"schema": f"thinspec/{SCHEMA_MAJOR}"}
    payload.update(obj)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
