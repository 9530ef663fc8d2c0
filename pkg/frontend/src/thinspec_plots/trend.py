"""Trend charts: measure-vs-level curves and box-count scaling lines."""

from __future__ import annotations

import argparse
import math
import sys

from .jobs import PlotJob, add_style_flags, job_from_args, new_figure, save
from .schema import SchemaError, read_approximants, read_boxdim


def render(job: PlotJob, x_col: str = "level", y_col: str = "measure",
           log_y: bool = False, source: str = "approximants") -> None:
    fig, ax = new_figure(job)
    if source == "approximants":
        rows = read_approximants(job.inputs[0])
        xs = [r[x_col] for r in rows]
        ys = [r[y_col] for r in rows]
        ax.plot(xs, ys, marker="o", color="black")
        ax.set_xlabel(x_col)
        ax.set_ylabel(y_col)
        if log_y:
            ax.set_yscale("log")
        ax.set_title(f"{y_col} vs {x_col}")
    else:
        rows = read_boxdim(job.inputs[0])
        xs = [math.log(1.0 / e) for e, _ in rows]
        ys = [math.log(n) for _, n in rows]
        ax.plot(xs, ys, marker="o", color="black")
        ax.set_xlabel("log 1/eps")
        ax.set_ylabel("log N(eps)")
        ax.set_title("box-count scaling")
    fig.tight_layout()
    save(fig, job)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render a trend chart from an approximants or boxdim CSV")
    parser.add_argument("csv")
    parser.add_argument("--source", choices=("approximants", "boxdim"),
                        default="approximants")
    parser.add_argument("--x", default="level", choices=("level", "q"))
    parser.add_argument("--y", default="measure", choices=("measure", "band_count"))
    parser.add_argument("--log-y", action="store_true")
    add_style_flags(parser)
    args = parser.parse_args(argv)
    job = job_from_args(args, [args.csv], "trend")
    try:
        render(job, args.x, args.y, args.log_y, args.source)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
