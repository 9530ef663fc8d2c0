"""Band diagram: shaded bands with the discriminant curve and +-2 guides."""

from __future__ import annotations

import argparse
import sys

from .jobs import PlotJob, add_style_flags, job_from_args, new_figure, save
from .schema import SchemaError, read_bands, read_discriminant


def render(job: PlotJob) -> None:
    bands = read_bands(job.inputs[0])
    fig, ax = new_figure(job)
    for _, a, b, _ in bands:
        ax.axvspan(a, b, color="#7fbf7f", alpha=0.45, linewidth=0)
    if len(job.inputs) > 1:
        samples = read_discriminant(job.inputs[1])
        es = [e for e, _ in samples]
        ds = [d for _, d in samples]
        ax.plot(es, ds, color="black", linewidth=0.9, label="D(E)")
        ax.axhline(2.0, color="red", linewidth=0.8)
        ax.axhline(-2.0, color="red", linewidth=0.8)
        ax.set_ylim(-6.0, 6.0)
        ax.legend(loc="upper right")
    if job.energy_window:
        ax.set_xlim(*job.energy_window)
    elif bands:
        ax.set_xlim(bands[0][1], bands[-1][2])
    ax.set_xlabel("E")
    ax.set_ylabel("D(E)")
    ax.set_title("bands (shaded) and discriminant")
    fig.tight_layout()
    save(fig, job)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render a band diagram from a bands CSV, optionally "
                    "overlaying discriminant samples")
    parser.add_argument("csv", help="bands CSV (kind=bands)")
    parser.add_argument("--discriminant", help="discriminant CSV (kind=discriminant)")
    add_style_flags(parser)
    args = parser.parse_args(argv)
    inputs = [args.csv] + ([args.discriminant] if args.discriminant else [])
    job = job_from_args(args, inputs, "bands")
    try:
        render(job)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
