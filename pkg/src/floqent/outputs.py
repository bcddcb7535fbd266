"""CSV tables, SVG figures and provenance files."""
import csv
import math
import os
import platform

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "floqent"
SVG_METADATA = {"Date": None, "Creator": None}
COLORMAP = "viridis"


def format_value(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, float)) or hasattr(v, "dtype"):
        f = float(v)
        if math.isnan(f):
            return "nan"
        return format(f, ".17g")
    return str(v).replace(",", ";").replace("\n", " ")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def write_provenance(path, info):
    """Config echo first (re-loadable with ``--config``), then environment details."""
    config = info.get("config", "")
    lines = [config.rstrip("\n"), ""]
    lines.append(f"# python = {platform.python_version()}")
    lines.append(f"# matplotlib = {matplotlib.__version__}")
    for key, value in info.items():
        if key != "config":
            lines.append(f"# {key} = {value}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _save(fig, path, description):
    fig.savefig(path, format="svg", metadata={**SVG_METADATA, "Description": description})
    plt.close(fig)
    return path


def heatmap_svg(path, result, key="C_inf", description=""):
    """Colour map of ``key`` over a two-axis sweep, fixed range [0, 1]."""
    x_axis, y_axis = result.axes
    grid = result.grid(key)
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    mesh = ax.imshow(grid, origin="lower", aspect="auto", cmap=COLORMAP, vmin=0.0, vmax=1.0,
                     extent=_extent(x_axis) + _extent(y_axis), interpolation="nearest")
    ax.set_xlabel(x_axis.name)
    ax.set_ylabel(y_axis.name)
    fig.colorbar(mesh, ax=ax, label=key)
    fig.tight_layout()
    return _save(fig, path, description)


def _extent(axis):
    vals = axis.values()
    if len(vals) == 1:
        return [vals[0] - 0.5, vals[0] + 0.5]
    half = 0.5 * (vals[1] - vals[0])
    return [vals[0] - half, vals[-1] + half]


def lines_svg(path, header, rows, x_col, y_cols, logx=False, logy=False, ylim=None,
              description=""):
    """Line plot of selected CSV columns."""
    index = {name: k for k, name in enumerate(header)}
    xs = [float(r[index[x_col]]) for r in rows]
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    for col in y_cols:
        ax.plot(xs, [float(r[index[col]]) for r in rows], label=col)
    if logx:
        ax.set_xscale("symlog", linthresh=1.0)
    if logy:
        ax.set_yscale("log")
    if ylim is not None:
        ax.set_ylim(*ylim)
    ax.set_xlabel(x_col)
    ax.legend(fontsize="small")
    fig.tight_layout()
    return _save(fig, path, description)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
