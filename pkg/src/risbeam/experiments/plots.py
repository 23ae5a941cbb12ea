"""Plot-script emission: writes a standalone matplotlib script next to the
CSVs; nothing is rendered here."""

import os

EXPECTED = ("convergence.csv", "sweep_power.csv", "sweep_elements.csv",
            "sweep_kappa.csv", "sweep_users.csv", "timing_elements.csv",
            "timing_users.csv")

_TEMPLATE = '''"""Render figures from the experiment CSVs in this directory.

Generated by `risbeam plots`; requires matplotlib. Re-run after refreshing
the CSVs."""

import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt


def read_rows(name):
    rows = []
    with open(os.path.join(os.path.dirname(__file__) or ".", name)) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("scenario,"):
                continue
            parts = line.strip().split(",")
            if len(parts) != 8:
                continue
            rows.append(dict(
                scenario=parts[0], seed=int(parts[1]),
                sweep_value=float(parts[2]), iteration=int(parts[3]),
                gamma=float(parts[4]), min_sinr_db=float(parts[5]),
                max_residual=float(parts[6]), wall_ms=float(parts[7]),
            ))
    return rows


def plot_convergence(name, out):
    rows = [r for r in read_rows(name) if "/" not in r["scenario"]]
    by_seed = defaultdict(list)
    for r in rows:
        by_seed[r["seed"]].append((r["iteration"], r["min_sinr_db"]))
    fig, ax = plt.subplots()
    for seed, pts in sorted(by_seed.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], alpha=0.6,
                label=f"seed {seed}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("min SINR (dB)")
    ax.set_title("solver convergence")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    print("wrote", out)


def plot_sweep(name, out, xlabel):
    rows = [r for r in read_rows(name) if "/" not in r["scenario"]]
    by_value = defaultdict(list)
    for r in rows:
        by_value[r["sweep_value"]].append(r["min_sinr_db"])
    xs = sorted(by_value)
    means = [sum(by_value[x]) / len(by_value[x]) for x in xs]
    fig, ax = plt.subplots()
    ax.plot(xs, means, marker="o")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean min SINR (dB)")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    print("wrote", out)


def plot_timing(name, out):
    rows = [r for r in read_rows(name) if "/" not in r["scenario"]]
    xs = [r["sweep_value"] for r in rows]
    ys = [r["wall_ms"] for r in rows]
    fig, ax = plt.subplots()
    ax.loglog(xs, ys, marker="o")
    ax.set_xlabel("sweep value")
    ax.set_ylabel("median per-iteration wall time (ms)")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    print("wrote", out)


if __name__ == "__main__":
%(body)s
'''


def emit_plots(csv_dir, script_name="plot_results.py") -> str:
    """Write a standalone rendering script referencing the CSVs present in
    ``csv_dir`` by relative path; error out if none are found."""
    present = [name for name in EXPECTED
               if os.path.exists(os.path.join(csv_dir, name))]
    if not present:
        raise FileNotFoundError(
            f"no experiment CSVs in {csv_dir!r}; expected one of: "
            + ", ".join(EXPECTED)
        )
    body = []
    for name in present:
        stem = name.rsplit(".", 1)[0]
        if name == "convergence.csv":
            body.append(f'    plot_convergence("{name}", "{stem}.png")')
        elif name.startswith("sweep_"):
            axis = stem.split("_", 1)[1]
            body.append(f'    plot_sweep("{name}", "{stem}.png", "{axis}")')
        else:
            body.append(f'    plot_timing("{name}", "{stem}.png")')
    path = os.path.join(csv_dir, script_name)
    with open(path, "w") as fh:
        fh.write(_TEMPLATE % {"body": "\n".join(body)})
    return path
