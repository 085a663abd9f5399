"""Figures written next to the CSV reports."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_convergence", "plot_accuracy"]

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def plot_convergence(traces, labels, path):
    """Best objective per generation, one line per trace, log y axis."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        for trace, label in zip(traces, labels):
            gens = [r.generation for r in trace.records]
            best = [max(r.best_E, 1e-300) for r in trace.records]
            ax.plot(gens, best, lw=1.2, label=label)
        ax.set_xlabel("generation")
        ax.set_ylabel("best objective E")
        ax.set_yscale("log")
        ax.grid(alpha=0.3, lw=0.5)
        if len(labels) > 1:
            ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path


def plot_accuracy(summary, path):
    """Bar chart of mean test accuracy per training mode with std error bars.

    ``summary`` maps a mode name to ``(mean, std)``.
    """
    modes = list(summary)
    means = [summary[m][0] for m in modes]
    stds = [summary[m][1] for m in modes]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(3.6, 3.0))
        bars = ax.bar(modes, means, yerr=stds, capsize=4, color=["#4c72b0", "#dd8452", "#55a868"][: len(modes)])
        for bar, mean, std in zip(bars, means, stds):
            ax.annotate(f"{mean:.3f}", (bar.get_x() + bar.get_width() / 2, mean + std),
                        xytext=(0, 3), textcoords="offset points", ha="center", va="bottom")
        ax.set_ylim(0, 1.1)
        ax.set_ylabel("mean accuracy")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path
