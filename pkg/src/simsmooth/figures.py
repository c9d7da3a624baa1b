"""Bar-chart rendering of per-fold error rates, one figure per base model."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_COLORS = {
    "MLE": "#999999",
    "KATZ": "#777777",
    "RAND": "#c44e52",
    "KL": "#8172b2",
    "AVG": "#4c72b0",
    "L1": "#55a868",
    "CONFUSION": "#ccb974",
}


def render_error_bars(reports, out_dir, stem="errors"):
    """Write one grouped-bar PNG per base model; returns the file paths."""
    by_model = {}
    for r in reports:
        by_model.setdefault(r.base_model, {}).setdefault(r.method, []).append(r)
    paths = []
    for model_name in sorted(by_model):
        methods = by_model[model_name]
        names = list(methods)
        folds = sorted({r.fold for rs in methods.values() for r in rs})
        width = 0.8 / max(len(names), 1)
        fig, ax = plt.subplots(figsize=(7, 3.5))
        for mi, name in enumerate(names):
            per_fold = {r.fold: r.error_rate for r in methods[name]}
            xs = [f + (mi - (len(names) - 1) / 2) * width for f in folds]
            ys = [per_fold.get(f, 0.0) for f in folds]
            ax.bar(xs, ys, width=width, label=name, color=_COLORS.get(name))
        ax.axhline(0.5, color="black", linewidth=0.8, linestyle="--", alpha=0.6)
        ax.set_xticks(folds)
        ax.set_xticklabels(["T%d" % (f + 1) for f in folds])
        ax.set_xlabel("test fold")
        ax.set_ylabel("error rate")
        ax.set_title(model_name)
        ax.set_ylim(0, max(0.6, ax.get_ylim()[1]))
        ax.legend(fontsize=8, ncol=min(len(names), 4))
        fig.tight_layout()
        path = os.path.join(out_dir, "%s_%s.png" % (stem, model_name))
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
