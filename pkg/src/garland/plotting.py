"""Matplotlib figures written next to the delimited reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.figsize": (6.4, 4.0),
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_minimal_q(result, path):
    """kappa(q) per link type of a minimal-q table, with thresholds."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        series = {}
        thresholds = set()
        for q, rep in sorted(result.reports.items()):
            for c in rep.checks:
                if c.kappa is None:
                    continue
                key = (c.link_type, c.k)
                series.setdefault(key, {})[q] = c.kappa
                thresholds.add((c.k, float(c.threshold)))
        for (tag, k), pts in sorted(series.items()):
            qs = sorted(pts)
            ax.plot(qs, [pts[q] for q in qs], marker="o", ms=3, label=f"{tag} (k={k})")
        for k, thr in sorted(thresholds):
            ax.axhline(thr, ls="--", lw=0.8, color="k")
            ax.annotate(f"k={k}", (ax.get_xlim()[0], thr), fontsize=8, va="bottom")
        if result.minimal_q:
            ax.axvline(result.minimal_q, color="tab:red", lw=0.8, alpha=0.6)
        ax.set_xlabel("q")
        ax.set_ylabel("kappa")
        ax.set_title(result.diagram)
        ax.legend(fontsize=7, frameon=False)
        return _save(fig, path)


def plot_check(report, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        labels = [",".join(map(str, c.cotype)) for c in report.checks]
        x = np.arange(len(labels))
        kap = [c.kappa if c.kappa is not None else np.nan for c in report.checks]
        colors = {"pass": "tab:green", "fail": "tab:red", "unverified": "0.7"}
        ax.bar(x, np.nan_to_num(kap), color=[colors[c.status] for c in report.checks])
        ax.scatter(x, [float(c.threshold) for c in report.checks], marker="_", s=200, color="k",
                   zorder=3, label="threshold")
        ax.set_xticks(x)
        ax.set_xticklabels(labels, rotation=90, fontsize=7)
        ax.set_xlabel("cotype")
        ax.set_ylabel("kappa")
        ax.set_title(f"{report.diagram}  q={report.q}  {report.verdict}")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_spectrum(eigenvalues, path, title=""):
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        vals, counts = np.unique(np.round(np.asarray(eigenvalues), 9), return_counts=True)
        ax.stem(vals, counts)
        ax.set_xlabel("eigenvalue")
        ax.set_ylabel("multiplicity")
        ax.set_title(title)
        return _save(fig, path)
