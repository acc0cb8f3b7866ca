#include "rvm2d/plots.hpp"

#include <filesystem>
#include <stdexcept>

#include "rvm2d/io.hpp"

namespace fs = std::filesystem;

namespace rvm {

namespace {

const char kLedgerScript[] = R"PY(#!/usr/bin/env python3
"""Relative conservation drifts of one run (reads ledger.csv beside me)."""
import csv
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "ledger.csv")))
t = [float(r["t"]) for r in rows]


def rel(col):
    v0 = float(rows[0][col])
    scale = max(abs(v0), 1e-300)
    return [(float(r[col]) - v0) / scale for r in rows]


fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
ax1.plot(t, rel("total"), label="total energy")
ax1.plot(t, rel("mass"), label="mass")
ax1.set_ylabel("relative drift")
ax1.legend()
ax1.grid(alpha=0.3)
ax2.semilogy(t, [max(float(r["gauss_linf"]), 1e-300) for r in rows],
             label="Gauss residual")
ax2.set_xlabel("t")
ax2.set_ylabel("max |div E - rho|")
ax2.legend()
ax2.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(here / "ledger.png", dpi=150)
print("wrote", here / "ledger.png")
)PY";

const char kEnvelopeScript[] = R"PY(#!/usr/bin/env python3
"""Measured long-axis momentum extent vs the fitted anisotropy envelope."""
import csv
import math
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "envelope.csv")))
t = [float(r["t"]) for r in rows]
ptilde = [float(r["Ptilde"]) for r in rows]
p2 = [float(r["P2"]) for r in rows]


def envelope(ti, p2i):
    if ti * p2i <= 1.0:
        return float("nan")
    return ti ** 8 * p2i ** 3 * math.log(ti * p2i) ** 3


vals = [envelope(a, b) for a, b in zip(t, p2)]
ratios = [m / v for m, v in zip(ptilde, vals) if v == v and v > 0]
c_fit = max(ratios) if ratios else float("nan")

fig, ax = plt.subplots(figsize=(7, 4.5))
ax.semilogy(t, ptilde, "o-", ms=3, label="measured sup |p|")
ax.semilogy(t, [c_fit * v if v == v else float("nan") for v in vals],
            "--", label=f"c_fit * t^8 P2^3 log^3(t P2), c_fit={c_fit:.3g}")
ax.semilogy(t, p2, ":", label="sup |p2|")
ax.set_xlabel("t")
ax.set_ylabel("momentum extent")
ax.legend()
ax.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(here / "envelope.png", dpi=150)
print("wrote", here / "envelope.png")
)PY";

const char kDecompositionScript[] = R"PY(#!/usr/bin/env python3
"""Force decomposition pieces against their growth formulas."""
import csv
import math
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = pathlib.Path(__file__).resolve().parent
dec = list(csv.DictReader(open(here / "decomposition.csv")))
env = list(csv.DictReader(open(here / "envelope.csv")))


def support_at(ti):
    P = P2 = 0.0
    for r in env:
        if float(r["t"]) <= ti + 1e-12:
            P, P2 = float(r["P"]), float(r["P2"])
    return P, P2


t = [float(r["t"]) for r in dec]
series = {
    "K_T": ([float(r["K_T"]) for r in dec], [float(r["err_T"]) for r in dec]),
    "K_S1": ([float(r["K_S1"]) for r in dec], [float(r["err_S1"]) for r in dec]),
    "K_S2": ([float(r["K_S2"]) for r in dec], [float(r["err_S2"]) for r in dec]),
}


def formulas(ti):
    P, P2 = support_at(ti)
    if P < 2.0 or P2 <= 0.0 or ti <= 1.05:
        return {k: float("nan") for k in series}
    lg = math.log(P)
    return {
        "K_T": ti * P2 * lg,
        "K_S1": ti * math.sqrt(math.log(ti)) * P2 * lg,
        "K_S2": ti * (P2 * P * lg) ** 0.75,
    }


bounds = {k: [] for k in series}
for ti in t:
    f = formulas(ti)
    for k in series:
        bounds[k].append(f[k])

fig, axes = plt.subplots(1, 3, figsize=(12, 4), sharex=True)
for ax, (name, (vals, errs)) in zip(axes, series.items()):
    ax.errorbar(t, vals, yerr=errs, fmt="o", ms=4, capsize=3,
                label=f"{name} measured")
    good = [(a, v, b) for a, v, b in zip(t, vals, bounds[name])
            if b == b and b > 0]
    if good:
        scale = max(v / b for _, v, b in good)
        ax.plot([g[0] for g in good], [scale * g[2] for g in good], "--",
                label=f"c*formula, c={scale:.3g}")
    ax.set_title(name)
    ax.set_xlabel("apex t")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(here / "decomposition.png", dpi=150)
print("wrote", here / "decomposition.png")
)PY";

}  // namespace

void emit_plots(const std::string& run_dir) {
  if (!fs::exists(run_dir + "/ledger.csv"))
    throw std::runtime_error("emit_plots: missing artifact ledger.csv in " +
                             run_dir);
  if (!fs::exists(run_dir + "/envelope.csv"))
    throw std::runtime_error("emit_plots: missing artifact envelope.csv in " +
                             run_dir);
  write_text_file(run_dir + "/plot_ledger.py", kLedgerScript);
  write_text_file(run_dir + "/plot_envelope.py", kEnvelopeScript);
  if (fs::exists(run_dir + "/decomposition.csv"))
    write_text_file(run_dir + "/plot_decomposition.py", kDecompositionScript);
}

}  // namespace rvm
