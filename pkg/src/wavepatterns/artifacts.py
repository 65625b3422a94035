"""Deterministic CSV, JSON and plot-script writers.

Floats are written with 17 significant digits so files round-trip exactly and
identical runs give byte-identical outputs.
"""
import json
import os

import numpy as np


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(path, columns):
    """``columns`` maps header names to equal-length 1-D arrays."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float).ravel() for k in names])
    np.savetxt(path, data, delimiter=",", header=",".join(names), comments="", fmt="%.17g")
    return path


def read_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with open(path, encoding="utf-8") as fh:
        names = fh.readline().strip().split(",")
    return {k: data[:, i] for i, k in enumerate(names)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def time_tag(t):
    return f"{float(t):g}".replace("-", "m")


_PLOT_TEMPLATE = '''"""Plot {title}. Run with: python {script} (needs matplotlib)."""
import csv
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
FILES = {files!r}
X_KEY = {x_key!r}
Y_KEYS = {y_keys!r}
LOG_Y = {log_y!r}


def load(name):
    with open(os.path.join(HERE, name), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {{k: [float(r[k]) for r in rows] for k in rows[0]}}


fig, axes = plt.subplots(len(Y_KEYS), 1, figsize=(7, 2.4 * len(Y_KEYS)), sharex=True, squeeze=False)
for name in FILES:
    data = load(name)
    for ax, key in zip(axes[:, 0], Y_KEYS):
        ax.plot(data[X_KEY], data[key], label=name)
        ax.set_ylabel(key)
        if LOG_Y:
            ax.set_yscale("log")
axes[-1, 0].set_xlabel(X_KEY)
axes[0, 0].legend(fontsize="small")
fig.tight_layout()
fig.savefig(os.path.join(HERE, {png!r}), dpi=120)
'''


def write_plot_script(directory, script, title, files, x_key, y_keys, log_y=False):
    """Self-contained matplotlib script that plots the given CSVs next to itself."""
    path = os.path.join(directory, script)
    png = os.path.splitext(script)[0] + ".png"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_PLOT_TEMPLATE.format(title=title, script=script, files=list(files), x_key=x_key,
                                       y_keys=list(y_keys), log_y=log_y, png=png))
    return path
