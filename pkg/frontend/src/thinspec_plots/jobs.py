"""Plot job description shared by the three figure scripts."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PlotJob:
    """One figure: inputs, kind, output path, style.

    Rendering is deterministic for fixed inputs and style, never modifies the
    inputs, and overwrites the output idempotently.
    """

    inputs: tuple[str, ...]
    kind: str                      # "butterfly" | "bands" | "trend"
    output: str
    dpi: int = 150
    size: tuple[float, float] = (8.0, 6.0)
    energy_window: tuple[float, float] | None = None


def add_style_flags(parser):
    parser.add_argument("--out", required=True, help="output image path (png/svg/pdf)")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--size", default="8,6", help="figure size inches, W,H")
    parser.add_argument("--window", default=None, help="energy window lo,hi")


def job_from_args(args, inputs, kind) -> PlotJob:
    w, h = (float(t) for t in args.size.split(","))
    window = None
    if args.window:
        lo, hi = (float(t) for t in args.window.split(","))
        window = (lo, hi)
    return PlotJob(tuple(inputs), kind, args.out, args.dpi, (w, h), window)


def new_figure(job: PlotJob):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=job.size, dpi=job.dpi)
    return fig, ax


def save(fig, job: PlotJob):
    # strip volatile metadata so identical jobs produce identical bytes
    metadata = {"Software": "", "Date": None, "CreationDate": None}
    suffix = job.output.rsplit(".", 1)[-1].lower()
    if suffix == "png":
        metadata = {"Software": ""}
    fig.savefig(job.output, metadata=metadata)
