"""Report figures for the stats, score and significance commands."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.family": "sans-serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.figsize": (5.0, 3.2),
    "figure.dpi": 100,
    "svg.hashsalt": "rbmtkit",
}

# strip timestamps so reruns write identical files
_METADATA = {
    ".png": {"Software": None},
    ".pdf": {"Creator": None, "Producer": None, "CreationDate": None},
    ".svg": {"Creator": None, "Date": None},
}


def new(nrows=1, ncols=1):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(nrows=nrows, ncols=ncols, layout="constrained")
    return fig, ax


def save(fig, path) -> Path:
    path = Path(path)
    with plt.rc_context(STYLE):
        fig.savefig(path, metadata=_METADATA.get(path.suffix.lower()))
    plt.close(fig)
    return path


def plot_bootstrap(report, path) -> Path:
    """Histogram of per-sample score differences (A minus B)."""
    fig, ax = new()
    ax.hist(report.deltas, bins=40, color="0.55", edgecolor="white", linewidth=0.4)
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel(f"{report.metric.upper()} difference (A - B) per bootstrap sample")
    ax.set_ylabel("samples")
    ax.set_title(f"p = {report.p_value:.4f} ({report.verdict} at alpha = {report.alpha})")
    return save(fig, path)


def plot_sentence_scores(scores: dict[str, list[float]], path) -> Path:
    names = sorted(scores)
    fig, axes = new(ncols=len(names))
    if len(names) == 1:
        axes = [axes]
    for ax, name in zip(axes, names):
        ax.hist(scores[name], bins=20, color="0.55", edgecolor="white", linewidth=0.4)
        ax.set_xlabel(name)
    axes[0].set_ylabel("sentences")
    return save(fig, path)


def plot_corpus_stats(stats: dict[str, dict[str, int]], path) -> Path:
    """Grouped bars: one group per statistic, one bar per corpus file."""
    keys = ["words", "vocab", "subwords", "subword_vocab", "lines"]
    names = list(stats)
    width = 0.8 / max(len(names), 1)
    fig, ax = new()
    for k, name in enumerate(names):
        xs = [i + k * width for i in range(len(keys))]
        ax.bar(xs, [stats[name][key] for key in keys], width=width, label=name)
    ax.set_xticks([i + width * (len(names) - 1) / 2 for i in range(len(keys))], keys)
    ax.set_yscale("symlog")
    ax.set_ylabel("count")
    if len(names) > 1:
        ax.legend(frameon=False)
    return save(fig, path)
