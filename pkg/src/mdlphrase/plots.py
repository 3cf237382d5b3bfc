"""Optional SVG figures (requires matplotlib)."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence


def render_svgs(outdir: Path, long_lengths: Sequence[int], curve: Sequence[tuple[int, float]]) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    fig, ax = plt.subplots(figsize=(4, 3))
    if long_lengths:
        ax.boxplot(list(long_lengths))
    ax.set_ylabel("pattern length (tokens)")
    fig.tight_layout()
    path = Path(outdir) / "lengths.svg"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(5, 3))
    if curve:
        steps, comp = zip(*curve)
        ax.plot(steps, comp)
    ax.set_xlabel("model update")
    ax.set_ylabel("compression (%)")
    fig.tight_layout()
    path = Path(outdir) / "curve.svg"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)
    return written
