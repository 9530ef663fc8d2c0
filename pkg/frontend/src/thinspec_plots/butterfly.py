"""Butterfly figure: one horizontal segment per band row at height p/q."""

from __future__ import annotations

import argparse
import sys

from .jobs import PlotJob, add_style_flags, job_from_args, new_figure, save
from .schema import SchemaError, read_butterfly


def render(job: PlotJob) -> None:
    from matplotlib.collections import LineCollection

    bands = read_butterfly(job.inputs[0])
    fig, ax = new_figure(job)
    segments = [[(b.lo, float(b.frequency)), (b.hi, float(b.frequency))]
                for b in bands]
    heights = sorted({float(b.frequency) for b in bands})
    lw = max(0.4, min(2.0, 60.0 / max(len(heights), 1)))
    ax.add_collection(LineCollection(segments, colors="black", linewidths=lw))
    ax.autoscale()
    if job.energy_window:
        ax.set_xlim(*job.energy_window)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("E")
    ax.set_ylabel("p/q")
    ax.set_title("band rows by rational frequency")
    fig.tight_layout()
    save(fig, job)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render a butterfly figure from a butterfly CSV")
    parser.add_argument("csv", help="butterfly CSV (kind=butterfly)")
    add_style_flags(parser)
    args = parser.parse_args(argv)
    job = job_from_args(args, [args.csv], "butterfly")
    try:
        render(job)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
