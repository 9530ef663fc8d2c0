"""Flat sectioned key-value run configuration (INI dialect).

A config file fully determines a command's inputs, so runs are reproducible
from the file alone; command-line flags override file values.  Round trip
through to_text/from_text is lossless.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace

from .errors import InvalidInputError
from .floquet import PeriodicPotential
from .lattice import LatticePotential
from .quasiperiodic import (GOLDEN_MEAN_INV, AMOParams, FibonacciParams,
                            amo_sequence, fibonacci_lattice)

DEFAULT_TOLERANCES = {
    "merge": 1e-9,
    "edge": 1e-9,
    "tangency": 1e-7,
    "phase": 1e-3,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs: potential spec, window, tolerances, outputs."""

    command: str = ""
    potential: dict = field(default_factory=dict)
    window: tuple[float, float] | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out_dir: str = "out"
    threads: int = 1
    params: dict = field(default_factory=dict)   # command-specific settings

    def __post_init__(self):
        for name, val in self.tolerances.items():
            if not (val > 0 and math.isfinite(val)):
                raise InvalidInputError(f"tolerance {name} must be positive, got {val}")
        if self.window is not None and not (self.window[0] < self.window[1]):
            raise InvalidInputError(f"invalid window {self.window}")
        if self.threads < 1:
            raise InvalidInputError("threads must be >= 1")

    # -- file format ---------------------------------------------------------

    def to_text(self) -> str:
        cp = configparser.ConfigParser()
        cp["run"] = {"command": self.command, "out_dir": self.out_dir,
                     "threads": str(self.threads)}
        if self.potential:
            cp["potential"] = {k: str(v) for k, v in self.potential.items()}
        if self.window is not None:
            cp["window"] = {"lo": repr(self.window[0]), "hi": repr(self.window[1])}
        cp["tolerances"] = {k: repr(v) for k, v in self.tolerances.items()}
        if self.params:
            cp["params"] = {k: str(v) for k, v in self.params.items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @staticmethod
    def from_text(text: str) -> "RunConfig":
        cp = configparser.ConfigParser()
        cp.read_string(text)
        if not cp.sections():
            raise InvalidInputError("empty config: no sections found")
        run = cp["run"] if cp.has_section("run") else {}
        window = None
        if cp.has_section("window"):
            window = (float(cp["window"]["lo"]), float(cp["window"]["hi"]))
        tol = dict(DEFAULT_TOLERANCES)
        if cp.has_section("tolerances"):
            for k, v in cp["tolerances"].items():
                tol[k] = float(v)
        potential = dict(cp["potential"]) if cp.has_section("potential") else {}
        params = dict(cp["params"]) if cp.has_section("params") else {}
        return RunConfig(
            command=run.get("command", ""),
            potential=potential,
            window=window,
            tolerances=tol,
            out_dir=run.get("out_dir", "out"),
            threads=int(run.get("threads", "1")),
            params=params,
        )

    @staticmethod
    def from_file(path) -> "RunConfig":
        with open(path) as fh:
            return RunConfig.from_text(fh.read())

    def override(self, **kwargs) -> "RunConfig":
        merged = {}
        for key, val in kwargs.items():
            if val is None:
                continue
            if key in ("tolerances", "params", "potential"):
                base = dict(getattr(self, key))
                base.update(val)
                merged[key] = base
            else:
                merged[key] = val
        return replace(self, **merged) if merged else self


def _parse_cells(text: str) -> list[tuple[float, float]]:
    cells = []
    for item in text.split(","):
        length, _, value = item.partition(":")
        cells.append((float(length), float(value)))
    return cells


def continuum_potential_from_config(spec: dict) -> PeriodicPotential:
    """Build a continuum potential from [potential] keys.

    kinds: constant (value, period), cells (cells=len:val,...), cosine
    (coeffs=c0,c1,..., period), continuum-fibonacci (lambda, level, f0/f1 cells).
    """
    kind = spec.get("kind")
    if kind == "constant":
        return PeriodicPotential.constant(float(spec.get("value", 0.0)),
                                          float(spec.get("period", 1.0)))
    if kind == "cells":
        cells = _parse_cells(spec["cells"])
        pot = PeriodicPotential.from_cells(cells, float(spec["period"])
                                           if "period" in spec else None)
    elif kind == "cosine":
        coeffs = [float(c) for c in spec["coeffs"].split(",")]
        pot = PeriodicPotential.from_cosine(coeffs, float(spec.get("period", 1.0)))
    elif kind == "continuum-fibonacci":
        from .quasiperiodic import ContinuumFibonacciParams, continuum_fibonacci_potential
        params = ContinuumFibonacciParams(
            lam=float(spec["lambda"]),
            omega=float(spec.get("omega", 0.0)),
            f0=tuple(_parse_cells(spec["f0"])) if "f0" in spec else ((1.0, 0.0),),
            f1=tuple(_parse_cells(spec["f1"])) if "f1" in spec else ((1.0, 1.0),),
        )
        return continuum_fibonacci_potential(params, int(spec["level"]))
    else:
        raise InvalidInputError(
            f"unknown or missing continuum potential kind {kind!r} "
            "(expected constant | cells | cosine | continuum-fibonacci)")
    if "sup_norm" in spec:
        pot = replace(pot, sup_norm_bound=float(spec["sup_norm"]))
    return pot


def lattice_potential_from_config(spec: dict) -> LatticePotential:
    """Build a lattice potential: inline values or a generator reference."""
    kind = spec.get("kind")
    if kind == "values":
        values = tuple(float(x) for x in spec["values"].split(","))
        return LatticePotential(values)
    if kind == "amo":
        from fractions import Fraction
        params = AMOParams(lam=float(spec["lambda"]),
                           alpha=float(spec.get("alpha", GOLDEN_MEAN_INV)),
                           omega=float(spec.get("omega", 0.0)))
        return amo_sequence(Fraction(int(spec["p"]), int(spec["q"])), params)
    if kind == "fibonacci":
        params = FibonacciParams(lam=float(spec["lambda"]),
                                 omega=float(spec.get("omega", 0.0)))
        return fibonacci_lattice(params, int(spec["level"]))
    raise InvalidInputError(
        f"unknown or missing lattice potential kind {kind!r} "
        "(expected values | amo | fibonacci)")
