"""Command-line interface: reproducible dataset-producing commands.

Commands: bands, discrete-bands, butterfly, approximants, sum, boxdim,
capacity, verify.  All numeric work happens in the library modules; this
layer parses configuration, wires a bounded thread pool through as an
order-preserving parallel map (results are independent of the thread budget),
and writes the versioned CSV/JSON outputs.

Exit codes: 0 success, 1 verification failure, 2 numeric non-convergence,
64 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import dataio
from .errors import ConvergenceError, InvalidInputError, ResolutionError, SchemaError
from .floquet import OdeOptions, ScanOptions, band_gap_report, band_structure
from .fractal import box_dimension, d_fold_sum, minkowski_sum
from .capacity import capacity_discrete_spectrum, capacity_numeric
from .intervals import Interval, gaps as interval_gaps, measure, normalize
from .lattice import BandOptions, discrete_band_structure
from .quasiperiodic import (
    AMOParams,
    FibonacciParams,
    PhaseOptions,
    approximant_spectra,
    butterfly,
)
from .runconfig import (
    RunConfig,
    continuum_potential_from_config,
    lattice_potential_from_config,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


def _error_json(code: int, message: str, context: dict | None = None) -> str:
    return json.dumps({"code": code, "message": message, "context": context or {}})


def make_pmap(threads: int):
    """Order-preserving parallel map over a bounded worker pool."""
    if threads <= 1:
        return lambda fn, items: list(map(fn, items))

    def pmap(fn, items):
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))

    return pmap


def _scan_options(cfg: RunConfig) -> ScanOptions:
    t = cfg.tolerances
    return ScanOptions(edge_tol=t["edge"], tangency_tol=t["tangency"],
                       merge_tol=t["merge"])


def _band_options(cfg: RunConfig) -> BandOptions:
    t = cfg.tolerances
    return BandOptions(edge_tol=t["edge"], tangency_tol=t["tangency"],
                       merge_tol=t["merge"])


def _phase_options(cfg: RunConfig) -> PhaseOptions:
    return PhaseOptions(phase_tol=cfg.tolerances["phase"],
                        mode=cfg.params.get("phase_mode", "union"))


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_bands(cfg: RunConfig) -> int:
    if cfg.window is None:
        raise _UsageError("bands requires a window (config [window] or --window)")
    pot = continuum_potential_from_config(cfg.potential)
    window = Interval(*cfg.window)
    opts = _scan_options(cfg)
    bs = band_structure(pot, window, opts)
    out = _out_dir(cfg)
    dataio.write_bands_csv(bs.split_bands, out / "bands.csv")
    gap_list = interval_gaps(bs.bands, window)
    dataio.write_intervals_csv(normalize(gap_list, opts.merge_tol), out / "gaps.csv")
    # discriminant samples over the window, for figure overlays
    import numpy as np
    from .floquet import _DiscriminantEvaluator
    es = np.linspace(window.lo, window.hi, int(cfg.params.get("d_samples", 2000)))
    ev = _DiscriminantEvaluator(pot, OdeOptions(), es[[0, len(es) // 2, -1]])
    dataio.write_discriminant_csv(es, ev(es), out / "discriminant.csv")
    k_report = min(len(bs.split_bands), int(cfg.params.get("summary_k", 5)))
    rep = band_gap_report(pot, k_report, opts, window) if k_report else None
    dataio.write_json_report({
        "band_count": len(bs.split_bands),
        "first_k_gaps": [row.gap_len for row in rep.rows] if rep else [],
        "deficits": [row.band_deficit for row in rep.rows] if rep else [],
        "tangencies": [t.energy for t in bs.tangencies],
        "resolved": bs.resolved,
    }, out / "summary.json")
    return EXIT_OK


def cmd_discrete_bands(cfg: RunConfig) -> int:
    v = lattice_potential_from_config(cfg.potential)
    opts = _band_options(cfg)
    dbs = discrete_band_structure(v, opts)
    out = _out_dir(cfg)
    dataio.write_bands_csv(dbs.bands.intervals, out / "bands.csv")
    span = dbs.bands.span
    gap_list = interval_gaps(dbs.bands, span) if span else []
    dataio.write_intervals_csv(normalize(gap_list, opts.merge_tol), out / "gaps.csv")
    dataio.write_json_report({
        "band_count": dbs.band_count,
        "q": v.q,
        "measure": measure(dbs.bands),
        "tangencies": list(dbs.tangency_energies),
    }, out / "summary.json")
    return EXIT_OK


def cmd_butterfly(cfg: RunConfig) -> int:
    from .quasiperiodic import ButterflyRow, _union_spectrum

    lam = float(cfg.params.get("lambda", 1.0))
    q_max = int(cfg.params.get("q_max", 10))
    out = _out_dir(cfg)
    final = out / "butterfly.csv"
    partial = out / "butterfly.partial.csv"
    manifest = out / "butterfly.manifest.json"

    done: dict[Fraction, object] = {}
    if manifest.exists() and partial.exists():
        meta = json.loads(manifest.read_text())
        if meta.get("lambda") == lam and meta.get("q_max") == q_max:
            done = dict(dataio.read_butterfly_csv(partial, cfg.tolerances["merge"]))

    fracs = sorted({Fraction(p, q) for q in range(1, q_max + 1) for p in range(0, q + 1)})
    todo = [f for f in fracs if f not in done]
    pmap = make_pmap(cfg.threads)
    phase_opts = _phase_options(cfg)
    band_opts = _band_options(cfg)

    def run_one(frac):
        spec, _ = _union_spectrum(frac.numerator, frac.denominator, lam,
                                  phase_opts, band_opts, band_opts.merge_tol)
        return spec

    spectra = dict(done)
    try:
        # one batch per denominator, so interrupted runs resume by q
        for q in range(1, q_max + 1):
            batch = [f for f in todo if f.denominator == q]
            if not batch:
                continue
            for frac, spec in zip(batch, pmap(run_one, batch)):
                spectra[frac] = spec
    except Exception:
        rows = [ButterflyRow(f.numerator, f.denominator, spectra[f])
                for f in fracs if f in spectra]
        dataio.write_butterfly_csv(rows, partial)
        manifest.write_text(json.dumps(
            {"lambda": lam, "q_max": q_max,
             "completed": [[f.numerator, f.denominator] for f in fracs if f in spectra]}))
        raise
    rows = [ButterflyRow(f.numerator, f.denominator, spectra[f]) for f in fracs]
    dataio.write_butterfly_csv(rows, final)
    partial.unlink(missing_ok=True)
    manifest.unlink(missing_ok=True)
    return EXIT_OK


def cmd_approximants(cfg: RunConfig) -> int:
    gen_kind = cfg.params.get("generator", "amo")
    lam = float(cfg.params.get("lambda", 1.0))
    levels_text = str(cfg.params.get("levels", "4"))
    if ":" in levels_text:
        a, b = levels_text.split(":")
        levels = list(range(int(a), int(b) + 1))
    elif "," in levels_text:
        levels = [int(x) for x in levels_text.split(",")]
    else:
        levels = int(levels_text)
    if gen_kind == "amo":
        gen = AMOParams(lam=lam, omega=float(cfg.params.get("omega", 0.0)))
    elif gen_kind == "fibonacci":
        gen = FibonacciParams(lam=lam, omega=float(cfg.params.get("omega", 0.0)))
    else:
        raise _UsageError(f"unknown generator {gen_kind!r} (amo | fibonacci)")
    reports = approximant_spectra(gen, levels, _phase_options(cfg),
                                  _band_options(cfg), make_pmap(cfg.threads))
    out = _out_dir(cfg)
    dataio.write_approximants_csv(reports, out / "approximants.csv")
    for r in reports:
        dataio.write_intervals_csv(r.spectrum, out / f"spectrum_level{r.level}.csv")
    return EXIT_OK


def cmd_sum(cfg: RunConfig) -> int:
    inputs = [s.strip() for s in str(cfg.params.get("inputs", "")).split(",") if s.strip()]
    if not inputs:
        raise _UsageError("sum requires params inputs=<csv>[,<csv>...]")
    merge_tol = cfg.tolerances["merge"]
    sets = [dataio.read_spectrum_csv(p, merge_tol) for p in inputs]
    d = int(cfg.params.get("d", 1))
    total = sets[0]
    for other in sets[1:]:
        total = minkowski_sum(total, other)
    if d > 1:
        total = d_fold_sum(total, d)
    out = _out_dir(cfg)
    dataio.write_intervals_csv(total, out / "sum.csv")
    return EXIT_OK


def cmd_boxdim(cfg: RunConfig) -> int:
    path = cfg.params.get("input")
    if not path:
        raise _UsageError("boxdim requires params input=<csv>")
    u = dataio.read_spectrum_csv(path, cfg.tolerances["merge"])
    span = u.span
    eps_hi = float(cfg.params.get("eps_hi", span.length / 4.0))
    eps_lo = float(cfg.params.get("eps_lo", eps_hi / 1024.0))
    ratio = float(cfg.params.get("ratio", 2.0))
    est = box_dimension(u, eps_hi, eps_lo, ratio)
    out = _out_dir(cfg)
    dataio.write_boxdim_csv(est, out / "boxdim.csv")
    dataio.write_json_report({
        "slope": est.slope,
        "residual": est.fit_residual,
        "min_tail_slope": est.min_tail_slope,
    }, out / "boxdim_summary.json")
    return EXIT_OK


def cmd_capacity(cfg: RunConfig) -> int:
    n_nodes = int(cfg.params.get("n_nodes", 400))
    out = _out_dir(cfg)
    if cfg.potential.get("kind") in ("values", "amo", "fibonacci"):
        v = lattice_potential_from_config(cfg.potential)
        res = capacity_discrete_spectrum(v, n_nodes, _band_options(cfg))
        dataio.write_json_report({
            "capacity": res.exact,
            "robin_log_cap": 0.0,
            "residual": res.numeric.residual,
            "n_nodes": res.numeric.n_nodes,
            "exact_pathway": True,
            "numeric_cross_check": res.numeric.capacity,
        }, out / "capacity.json")
        return EXIT_OK
    path = cfg.params.get("input")
    if not path:
        raise _UsageError("capacity requires params input=<csv> or a lattice potential")
    u = dataio.read_spectrum_csv(path, cfg.tolerances["merge"])
    solve = capacity_numeric(u, n_nodes)
    dataio.write_json_report({
        "capacity": solve.capacity,
        "robin_log_cap": solve.robin_log_cap,
        "residual": solve.residual,
        "n_nodes": solve.n_nodes,
        "exact_pathway": False,
    }, out / "capacity.json")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .acceptance import run_acceptance
    results = run_acceptance(tolerances=cfg.tolerances, threads=cfg.threads)
    width = max(len(r.criterion) for r in results)
    all_pass = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        all_pass &= r.passed
        print(f"{r.criterion:<{width}}  {status}  [{r.runtime:7.2f}s]  {r.detail}")
    print(f"{'overall':<{width}}  {'PASS' if all_pass else 'FAIL'}")
    return EXIT_OK if all_pass else EXIT_VERIFY_FAILED


_COMMANDS = {
    "bands": cmd_bands,
    "discrete-bands": cmd_discrete_bands,
    "butterfly": cmd_butterfly,
    "approximants": cmd_approximants,
    "sum": cmd_sum,
    "boxdim": cmd_boxdim,
    "capacity": cmd_capacity,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="thinspec",
                     description="Band structure and thin-spectrum diagnostics "
                                 "for 1D Schrodinger operators")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="run configuration file")
    parser.add_argument("--out-dir", dest="out_dir")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--window", help="lo,hi energy window")
    parser.add_argument("--tol.merge", dest="tol_merge", type=float)
    parser.add_argument("--tol.edge", dest="tol_edge", type=float)
    parser.add_argument("--tol.tangency", dest="tol_tangency", type=float)
    parser.add_argument("--tol.phase", dest="tol_phase", type=float)
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a [params] entry (repeatable)")
    parser.add_argument("--potential", action="append", default=[], metavar="KEY=VALUE",
                        help="override a [potential] entry (repeatable)")
    return parser


def _kv_pairs(items) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise _UsageError(f"expected KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    tol = {}
    for name in ("merge", "edge", "tangency", "phase"):
        val = getattr(args, f"tol_{name}")
        if val is not None:
            tol[name] = val
    window = None
    if args.window:
        lo, hi = args.window.split(",")
        window = (float(lo), float(hi))
    cfg = cfg.override(
        command=args.command,
        out_dir=args.out_dir,
        threads=args.threads,
        window=window,
        tolerances=tol or None,
        params=_kv_pairs(args.set) or None,
        potential=_kv_pairs(args.potential) or None,
    )
    return _COMMANDS[args.command](cfg)


def main(argv=None) -> int:
    try:
        return run(argv)
    except (_UsageError, SchemaError, InvalidInputError) as exc:
        print(_error_json(EXIT_USAGE, str(exc)), file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ResolutionError) as exc:
        context = {}
        if isinstance(exc, ConvergenceError):
            context = {"achieved": getattr(exc, "achieved", None),
                       "target": getattr(exc, "target", None)}
        print(_error_json(EXIT_NUMERIC, str(exc), context), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
